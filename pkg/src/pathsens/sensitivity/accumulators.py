"""Ergodic-average accumulators for the relative entropy rate and pathwise FIM.

All quadratic forms use the diagonal inverse diffusion (sigma sigma^T)^{-1},
stored as one value per atom (beta / 2 gamma_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError, EstimationError


def block_stderr(series, n_blocks: int = 20) -> np.ndarray:
    """Standard error of the mean of a correlated series by block averaging.

    ``series`` has samples along axis 0; trailing samples that do not fill a
    block are dropped from the error estimate (not from the mean).
    """
    x = np.asarray(series, dtype=float)
    n = x.shape[0]
    if n < 2:
        return np.full(x.shape[1:], np.nan)
    nb = min(n_blocks, n)
    size = n // nb
    blocks = x[: nb * size].reshape((nb, size) + x.shape[1:]).mean(axis=1)
    return blocks.std(axis=0, ddof=1) / np.sqrt(nb)


@dataclass
class Estimate:
    mean: float
    stderr: float
    n_samples: int


def _quad(inv_diffusion, vec):
    """sum_i w_i |v_i|^2 over atoms for (..., N, 3) arrays."""
    return np.einsum("...ik,...ik,i->...", vec, vec, inv_diffusion)


@dataclass
class SensitivityAccumulator:
    """Running sums for RER (one entry per perturbation direction) and the FIM.

    Per-sample values are retained so that finalisation can use block
    averaging; accumulators combine with ``merge`` (associative).
    """

    inv_diffusion: np.ndarray
    labels: list = field(default_factory=list)
    param_names: list = field(default_factory=list)
    rer_sum: np.ndarray = None
    rer_sq_sum: np.ndarray = None
    fim_sum: np.ndarray = None
    n: int = 0
    n_fim: int = 0
    n_blocks: int = 20

    def __post_init__(self):
        self.inv_diffusion = np.asarray(self.inv_diffusion, dtype=float)
        d, k = len(self.labels), len(self.param_names)
        if self.rer_sum is None:
            self.rer_sum = np.zeros(d)
            self.rer_sq_sum = np.zeros(d)
        if self.fim_sum is None:
            self.fim_sum = np.zeros((k, k))
        self._rer_series = []
        self._fim_series = []
        self._disc_rer_series = []
        self._disc_fim_series = []
        self.dt = None

    @property
    def n_atoms(self) -> int:
        return self.inv_diffusion.shape[0]

    def _check_forces(self, arr, name):
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.shape[1:] != (self.n_atoms, 3) or arr.shape[0] != len(self.labels):
            raise ContractError(
                f"{name} has shape {arr.shape}, expected ({len(self.labels)}, {self.n_atoms}, 3)")
        return arr

    def _check_jac(self, jac):
        jac = np.asarray(jac, dtype=float)
        if jac.shape != (3 * self.n_atoms, len(self.param_names)):
            raise ContractError(
                f"Jacobian has shape {jac.shape}, expected ({3 * self.n_atoms}, {len(self.param_names)})")
        return jac

    def add_rer(self, delta_forces) -> np.ndarray:
        """Add 0.5 dF^T (sigma sigma^T)^{-1} dF for each direction; returns the sample."""
        df = self._check_forces(delta_forces, "force difference")
        vals = 0.5 * _quad(self.inv_diffusion, df)
        self.rer_sum += vals
        self.rer_sq_sum += vals * vals
        self.n += 1
        self._rer_series.append(vals)
        return vals

    def add_fim(self, jac) -> np.ndarray:
        jac = self._check_jac(jac)
        w = np.repeat(self.inv_diffusion, 3)
        sample = jac.T @ (w[:, None] * jac)
        self.fim_sum += sample
        self.n_fim += 1
        self._fim_series.append(sample)
        return sample

    def add_discrete_rer(self, df_now, df_next, dt: float) -> np.ndarray:
        """Per-step KL between BBK transition kernels (two Gaussian half-kicks)."""
        a = _quad(self.inv_diffusion, self._check_forces(df_now, "force difference"))
        b = _quad(self.inv_diffusion, self._check_forces(df_next, "force difference"))
        self._set_dt(dt)
        vals = 0.25 * dt * (a + b)
        self._disc_rer_series.append(vals)
        return vals

    def add_discrete_fim(self, jac_now, jac_next, dt: float) -> np.ndarray:
        w = np.repeat(self.inv_diffusion, 3)
        j0, j1 = self._check_jac(jac_now), self._check_jac(jac_next)
        self._set_dt(dt)
        sample = 0.5 * dt * (j0.T @ (w[:, None] * j0) + j1.T @ (w[:, None] * j1))
        self._disc_fim_series.append(sample)
        return sample

    def _set_dt(self, dt):
        if self.dt is not None and dt != self.dt:
            raise ContractError(f"time step changed from {self.dt} to {dt}")
        self.dt = dt

    def merge(self, other: "SensitivityAccumulator") -> "SensitivityAccumulator":
        if list(other.labels) != list(self.labels) or list(other.param_names) != list(self.param_names):
            raise ContractError("cannot merge accumulators over different directions/parameters")
        if not np.array_equal(other.inv_diffusion, self.inv_diffusion):
            raise ContractError("cannot merge accumulators with different diffusion")
        if self.dt is not None and other.dt is not None and self.dt != other.dt:
            raise ContractError("cannot merge accumulators with different time steps")
        out = SensitivityAccumulator(self.inv_diffusion, list(self.labels), list(self.param_names),
                                     self.rer_sum + other.rer_sum, self.rer_sq_sum + other.rer_sq_sum,
                                     self.fim_sum + other.fim_sum, self.n + other.n,
                                     self.n_fim + other.n_fim, self.n_blocks)
        out._rer_series = self._rer_series + other._rer_series
        out._fim_series = self._fim_series + other._fim_series
        out._disc_rer_series = self._disc_rer_series + other._disc_rer_series
        out._disc_fim_series = self._disc_fim_series + other._disc_fim_series
        out.dt = self.dt if self.dt is not None else other.dt
        return out

    def rer(self) -> dict:
        """Finalised continuous-time RER per direction: label -> Estimate."""
        if self.n == 0:
            raise EstimationError("no RER samples")
        se = block_stderr(np.array(self._rer_series), self.n_blocks)
        mean = self.rer_sum / self.n
        return {lab: Estimate(float(mean[d]), float(se[d]), self.n) for d, lab in enumerate(self.labels)}

    def fim(self) -> tuple[np.ndarray, np.ndarray]:
        """(mean FIM, block standard error), both K x K."""
        if self.n_fim == 0:
            raise EstimationError("no FIM samples")
        mean = self.fim_sum / self.n_fim
        mean = 0.5 * (mean + mean.T)
        return mean, block_stderr(np.array(self._fim_series), self.n_blocks)

    def discrete_rer(self, per_time: bool = True) -> dict:
        """Discrete-time RER per step, divided by dt when ``per_time``."""
        if not self._disc_rer_series:
            raise EstimationError("no discrete RER samples")
        x = np.array(self._disc_rer_series)
        if per_time:
            x = x / self.dt
        se = block_stderr(x, self.n_blocks)
        mean = x.mean(axis=0)
        return {lab: Estimate(float(mean[d]), float(se[d]), len(x)) for d, lab in enumerate(self.labels)}

    def discrete_fim(self, per_time: bool = True) -> tuple[np.ndarray, np.ndarray]:
        if not self._disc_fim_series:
            raise EstimationError("no discrete FIM samples")
        x = np.array(self._disc_fim_series)
        if per_time:
            x = x / self.dt
        return x.mean(axis=0), block_stderr(x, self.n_blocks)

    def rer_series(self) -> np.ndarray:
        return np.array(self._rer_series)


def rer_accumulate(acc: SensitivityAccumulator, f_ref, f_pert) -> SensitivityAccumulator:
    """Functional form of ``acc.add_rer(f_pert - f_ref)``."""
    f_ref = np.asarray(f_ref, dtype=float)
    f_pert = np.asarray(f_pert, dtype=float)
    if f_ref.shape != f_pert.shape:
        raise ContractError(f"force shapes differ: {f_ref.shape} vs {f_pert.shape}")
    acc.add_rer(f_pert - f_ref)
    return acc


def fim_accumulate(acc: SensitivityAccumulator, jac) -> SensitivityAccumulator:
    acc.add_fim(jac)
    return acc


def discrete_rer_accumulate(acc, df_now, df_next, dt) -> SensitivityAccumulator:
    acc.add_discrete_rer(df_now, df_next, dt)
    return acc


def discrete_fim_accumulate(acc, jac_now, jac_next, dt) -> SensitivityAccumulator:
    acc.add_discrete_fim(jac_now, jac_next, dt)
    return acc


def combine_replicas(means, stderrs=None) -> Estimate:
    """Mean over independent replicas with the between-replica standard error."""
    means = np.asarray(means, dtype=float)
    if means.size < 2:
        se = float(stderrs[0]) if stderrs is not None and len(stderrs) else np.nan
        return Estimate(float(means.mean()), se, int(means.size))
    return Estimate(float(means.mean()), float(means.std(ddof=1) / np.sqrt(means.size)), int(means.size))
