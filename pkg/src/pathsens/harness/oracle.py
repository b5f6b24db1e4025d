"""Analytic oracles: OU stiffness perturbation, inverse temperature, free diffusion,
and the BBK time-step gap on the OU model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import run_trajectory
from ..dynamics.rng import CounterNoise
from ..sensitivity import (
    SensitivitySink,
    build_alternatives,
    inverse_temp_rer,
    inverse_temp_rer_closed_form,
    log_beta_fim,
    log_beta_fim_closed_form,
)
from .config import load_config
from .experiment import build_system, run_experiment
from .models import ou_stationary_covariance

OU_GRID = ((1.0, 1.0, 0.1), (2.0, 1.0, 0.2), (1.0, 2.0, 0.1), (0.5, 0.5, 0.05))


@dataclass
class OracleResult:
    name: str
    passed: bool
    measured: float
    expected: float
    stderr: float = float("nan")
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        se = f" +/- {self.stderr:.3g}" if np.isfinite(self.stderr) else ""
        return f"[{tag}] {self.name}: measured {self.measured:.6g}{se}, expected {self.expected:.6g} {self.detail}"


def ou_config(k, gamma, delta, n_atoms=200, n_steps=10000, dt=0.02, seed=0, stride=2, discrete=False,
              temperature=1.0):
    return load_config({
        "model": "ou-oracle",
        "system": {"n_atoms": n_atoms, "box": 1000.0, "temperature": temperature},
        "dynamics": {"dt": dt, "n_steps": n_steps, "n_equil": 0, "gamma": gamma, "seed": seed},
        "parameters": {"k": k},
        "perturbations": [{"parameter": "k", "magnitude": delta / k, "signs": ["+"]}],
        "sensitivity": {"stride": stride, "fim": True, "discrete": discrete, "normalization": "none"},
    })


def ou_oracle(k, gamma, delta, n_sigma=3.0, **kw) -> list[OracleResult]:
    """RER and FIM per degree of freedom against delta^2/(4 gamma k) and 1/(2 gamma k)."""
    cfg = ou_config(k, gamma, delta, **kw)
    res = run_experiment(cfg, observables=False)
    ndof = 3 * cfg["system"]["n_atoms"]
    est = next(iter(res.rer.values()))
    rer, rer_se = est.mean / ndof, est.stderr / ndof
    fim, fim_se = res.fim.fim[0, 0] / ndof, res.fim.stderr[0, 0] / ndof
    want_rer = delta**2 / (4 * gamma * k)
    want_fim = 1.0 / (2 * gamma * k)
    tag = f"(k={k:g}, gamma={gamma:g}, delta={delta:g})"
    return [
        OracleResult(f"OU RER {tag}", abs(rer - want_rer) <= n_sigma * rer_se, rer, want_rer, rer_se),
        OracleResult(f"OU FIM {tag}", abs(fim - want_fim) <= n_sigma * fim_se, fim, want_fim, fim_se),
    ]


def ou_discrete_gap(dt, k=1.0, gamma=1.0, delta=0.1, n_atoms=1000, t_total=2000.0, seed=0):
    """(measured gap, its SE, exact gap) of RER_disc/dt against the continuous OU RER.

    The exact discrete-chain value uses the stationary BBK covariance.
    """
    n_steps = int(round(t_total / dt))
    cfg = ou_config(k, gamma, delta, n_atoms=n_atoms, n_steps=n_steps, dt=dt, seed=seed, stride=1,
                    discrete=True)
    system = build_system(cfg)
    # start from the exact stationary law of the chain so no burn-in is needed
    cov = ou_stationary_covariance(k, gamma, 1.0, dt)
    rng = CounterNoise(seed).generator(stream=7)
    z = rng.multivariate_normal(np.zeros(2), cov, size=(n_atoms, 3))
    system.state.q = system.forcefield.centre + z[..., 0]
    system.state.p = z[..., 1]
    system.state.evaluation = None
    alts = build_alternatives(system.theta, system.topo, [("k", delta / k)])
    sink = SensitivitySink(system.forcefield, system.langevin, alts, stride=1, fim=False, discrete=True,
                           n_blocks=20)
    run_trajectory(system.state, system.forcefield, system.langevin, [sink])
    ndof = 3 * n_atoms
    est = next(iter(sink.acc.discrete_rer().values()))
    cont = delta**2 / (4 * gamma * k)
    exact = 0.5 * delta**2 / (2 * gamma) * cov[0, 0] - cont
    return est.mean / ndof - cont, est.stderr / ndof, exact


def inverse_temperature_oracle(n_samples=200000, dim=3, n_atoms=2, mass=1.0, beta=1.0, gamma=1.0,
                               eps_beta=0.1, seed=0, rel_tol=0.01) -> list[OracleResult]:
    """Momentum estimator on exact Gibbs momenta against the closed forms."""
    rng = CounterNoise(seed).generator(stream=11)
    sigma = np.sqrt(2.0 * gamma / beta)
    masses = np.full(n_atoms, mass)
    p = rng.standard_normal((n_samples, n_atoms, dim)) * np.sqrt(mass / beta)
    rer = inverse_temp_rer(p, eps_beta, masses, sigma)
    want = inverse_temp_rer_closed_form(eps_beta, sigma, dim, n_atoms, beta, mass)
    flog = log_beta_fim(p, beta, masses, sigma)
    want_f = log_beta_fim_closed_form(gamma, dim, n_atoms, mass)
    return [
        OracleResult("inverse-temperature RER", abs(rer / want - 1) <= rel_tol, rer, want,
                     detail=f"(rel. tol {rel_tol:g})"),
        OracleResult("log-beta FIM", abs(flog / want_f - 1) <= rel_tol, flog, want_f,
                     detail=f"(rel. tol {rel_tol:g})"),
    ]


def free_particle_oracle(n_atoms=2000, gamma=1.0, temperature=1.0, dt=0.02, n_steps=10000, seed=0,
                         rel_tol=0.05) -> OracleResult:
    cfg = load_config({
        "model": "free-particle",
        "system": {"n_atoms": n_atoms, "box": 1000.0, "temperature": temperature},
        "dynamics": {"dt": dt, "n_steps": n_steps, "gamma": gamma, "seed": seed},
        "observables": {"msd_stride": 25, "msd_origin_stride": 2, "msd_max_lag": 80},
        "sensitivity": {"fim": False},
    })
    res = run_experiment(cfg, sensitivity=False)
    want = temperature / gamma
    D = res.observables["diffusion"]
    return OracleResult("free-particle diffusion", abs(D / want - 1) <= rel_tol, D, want,
                        detail=f"(rel. tol {rel_tol:g})")


def run_oracles(seed: int = 0) -> list[OracleResult]:
    out = []
    for i, (k, g, d) in enumerate(OU_GRID):
        out += ou_oracle(k, g, d, seed=seed + i)
    out += inverse_temperature_oracle(seed=seed)
    out.append(free_particle_oracle(seed=seed))
    return out
