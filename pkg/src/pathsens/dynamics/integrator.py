"""Langevin dynamics discretised with the BBK scheme."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DivergenceError
from .rng import CounterNoise
from .state import SystemState, wrap_positions


def fluctuation_dissipation(beta, gamma):
    """Noise amplitude sigma with sigma^2 = 2 gamma / beta (diagonal friction)."""
    if not np.all(np.asarray(beta) > 0):
        raise ConfigurationError("beta must be positive", "dynamics.beta")
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ConfigurationError("gamma must be non-negative", "dynamics.gamma")
    out = np.sqrt(2.0 * gamma / beta)
    return float(out) if out.ndim == 0 else out


@dataclass
class LangevinConfig:
    beta: float
    gamma: object = 1.0  # scalar or per-atom array, units mass/time
    dt: float = 1e-3
    n_steps: int = 0
    n_equil: int = 0
    seed: int = 0
    nonconservative_y_force: float = 0.0
    thermal_noise: bool = True
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigurationError("must be positive", "dynamics.beta")
        if not self.dt > 0:
            raise ConfigurationError("must be positive", "dynamics.dt")
        if np.any(np.asarray(self.gamma) < 0):
            raise ConfigurationError("must be non-negative", "dynamics.gamma")
        if self.n_steps < 0 or self.n_equil < 0:
            raise ConfigurationError("step counts must be non-negative", "dynamics.n_steps")

    def gamma_per_atom(self, n_atoms: int) -> np.ndarray:
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim == 0:
            return np.full(n_atoms, float(g))
        if g.shape != (n_atoms,):
            raise ConfigurationError(f"per-atom gamma has shape {g.shape}", "dynamics.gamma")
        return g

    def sigma_per_atom(self, n_atoms: int) -> np.ndarray:
        """Diffusion amplitude per atom, always derived from beta and gamma."""
        return fluctuation_dissipation(self.beta, self.gamma_per_atom(n_atoms))

    def _step_arrays(self, n_atoms: int):
        # gamma and the half-step noise amplitude as column vectors, built once per atom count
        key = (n_atoms, self.beta, self.dt, np.asarray(self.gamma).tobytes())
        if key not in self._cache:
            g = self.gamma_per_atom(n_atoms)[:, None]
            amp = self.sigma_per_atom(n_atoms)[:, None] * np.sqrt(0.5 * self.dt)
            self._cache.clear()
            self._cache[key] = (g, amp)
        return self._cache[key]

    def inv_diffusion(self, n_atoms: int) -> np.ndarray:
        """Diagonal of (sigma sigma^T)^{-1} = beta / (2 gamma), one entry per atom."""
        g = self.gamma_per_atom(n_atoms)
        if np.any(g <= 0):
            raise ConfigurationError("sensitivities need gamma > 0 (invertible diffusion)",
                                     "dynamics.gamma")
        return self.beta / (2.0 * g)


def total_force(evaluation, cfg: LangevinConfig) -> np.ndarray:
    """Conservative forces plus the constant non-gradient drive along y."""
    if cfg.nonconservative_y_force == 0.0:
        return evaluation.forces
    f = evaluation.forces.copy()
    f[:, 1] += cfg.nonconservative_y_force
    return f


def bbk_step(state: SystemState, forcefield, cfg: LangevinConfig, noise: CounterNoise) -> SystemState:
    """Advance one BBK step.

    Explicit friction half-kick with noise, drift, then the implicit half-kick
    solved in closed form: p1 = (p_half + F(q1) dt/2 + sigma dW) / (1 + gamma dt / 2m).
    ``forcefield.evaluate(state)`` must return a ForceEvaluation.
    """
    n = state.n_atoms
    h = cfg.dt
    m = state.masses[:, None]
    g, amp = cfg._step_arrays(n)
    ev = state.evaluation if state.evaluation is not None else forcefield.evaluate(state)

    if cfg.thermal_noise:
        kick1 = amp * noise.normals(state.step, 0, n)
        kick2 = amp * noise.normals(state.step, 1, n)
    else:
        kick1 = kick2 = 0.0

    p_half = state.p + 0.5 * h * total_force(ev, cfg) - 0.5 * h * g * state.p / m + kick1
    q_new = state.q + h * p_half / m
    if not np.all(np.isfinite(q_new)):
        raise DivergenceError(state.step + 1, "non-finite positions")
    q_new, images = wrap_positions(q_new, state.images, state.box)
    new = SystemState(q_new, p_half, state.box, state.masses, state.t + h, state.step + 1, images)
    try:
        new.evaluation = forcefield.evaluate(new)
    except ValueError as exc:
        raise DivergenceError(new.step, str(exc)) from exc
    new.p = (p_half + 0.5 * h * total_force(new.evaluation, cfg) + kick2) / (1.0 + 0.5 * h * g / m)
    if not (np.all(np.isfinite(new.p)) and np.all(np.isfinite(new.evaluation.forces))):
        raise DivergenceError(new.step, "non-finite momenta or forces",
                              {"max_force": float(np.nanmax(np.abs(new.evaluation.forces)))})
    return new
