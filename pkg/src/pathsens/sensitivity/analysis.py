"""Post-processing of RER/FIM estimates: quadratic form, log scaling, spectra,
inverse-temperature formulas, Pinsker bound and the odd/even split of RER."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, DomainError

SYMMETRY_TOL = 1e-10


def fim_quadratic_rer(fim, eps0) -> float:
    """Second-order RER prediction 0.5 eps0^T F eps0."""
    fim = np.asarray(fim, dtype=float)
    eps0 = np.asarray(eps0, dtype=float)
    if fim.shape != (eps0.size, eps0.size):
        raise ContractError(f"FIM shape {fim.shape} does not match perturbation length {eps0.size}")
    return float(0.5 * eps0 @ fim @ eps0)


def log_scale_fim(fim, theta) -> np.ndarray:
    """FIM in log-parameters: theta_i theta_j F_ij."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("log-scale FIM needs strictly positive parameters")
    return np.asarray(fim, dtype=float) * np.outer(theta, theta)


def fim_eigen(fim, tol: float = 1e-14, max_sweeps: int = 100):
    """Symmetric eigen-decomposition by cyclic Jacobi rotations.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.
    """
    a = np.array(fim, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"FIM must be square, got {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise ContractError("FIM is not symmetric")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(np.sqrt(np.sum(a * a)), np.finfo(float).tiny):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                with np.errstate(over="ignore"):
                    tau = (a[q, q] - a[p, p]) / (2.0 * apq)  # inf gives t = 0 below
                if tau == 0.0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 0.5 / tau  # tau^2 would overflow
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                vp = c * v[:, p] - s * v[:, q]
                vq = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vp, vq
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    # fix the sign so the largest component of each vector is positive
    for k in range(n):
        if v[np.argmax(np.abs(v[:, k])), k] < 0:
            v[:, k] = -v[:, k]
    return w, v


@dataclass
class FimReport:
    names: list
    fim: np.ndarray
    log_fim: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    stderr: np.ndarray
    log_eigenvalues: np.ndarray = None
    log_eigenvectors: np.ndarray = None

    @classmethod
    def build(cls, names, fim, stderr, theta_values) -> "FimReport":
        fim = np.asarray(fim, dtype=float)
        fim = 0.5 * (fim + fim.T)
        log_fim = log_scale_fim(fim, theta_values)
        w, v = fim_eigen(fim)
        lw, lv = fim_eigen(log_fim)
        return cls(list(names), fim, log_fim, w, v, np.asarray(stderr, dtype=float), lw, lv)

    def is_psd(self, rel_tol: float = 1e-8) -> bool:
        return bool(self.eigenvalues[-1] >= -rel_tol * max(self.eigenvalues[0], 0.0))


def momentum_quadratic(p, masses, sigma) -> np.ndarray:
    """p^T M^-1 sigma sigma^T M^-1 p per sample, for p of shape (S, N, d) or (N, d)."""
    p = np.asarray(p, dtype=float)
    masses = np.asarray(masses, dtype=float)
    w = np.broadcast_to(np.asarray(sigma, dtype=float) ** 2, masses.shape) / masses**2
    return np.einsum("...ik,...ik,i->...", p, p, w)


def inverse_temp_rer(momenta, eps_beta: float, masses, sigma) -> float:
    """RER for a perturbation beta -> beta + eps_beta from momentum samples alone."""
    return float(eps_beta**2 / 8.0 * np.mean(momentum_quadratic(momenta, masses, sigma)))


def inverse_temp_rer_closed_form(eps_beta, sigma, dim, n_atoms, beta, mass) -> float:
    """Equilibrium value eps_beta^2 sigma^2 d N / (8 beta m) for identical particles."""
    return eps_beta**2 * sigma**2 * dim * n_atoms / (8.0 * beta * mass)


def log_beta_fim(momenta, beta, masses, sigma) -> float:
    """Pathwise FIM in log(beta) estimated from momenta: (beta^2 / 4) E[p^T M^-1 sigma sigma^T M^-1 p]."""
    return float(beta**2 / 4.0 * np.mean(momentum_quadratic(momenta, masses, sigma)))


def log_beta_fim_closed_form(gamma, dim, n_atoms, mass) -> float:
    return gamma * dim * n_atoms / (2.0 * mass)


def pinsker_bound(rer: float, T: float, g_sup: float) -> float:
    """Bound on |E[g] - E'[g]| from the linear-in-time part of the path relative entropy."""
    if rer < 0 or T <= 0 or g_sup < 0:
        raise DomainError(f"pinsker_bound needs rer >= 0, T > 0, g_sup >= 0 (got {rer}, {T}, {g_sup})")
    return float(g_sup * np.sqrt(2.0 * T * rer))


@dataclass
class AsymmetryReport:
    odd: float
    even_residual: float
    odd_stderr: float
    significant: bool


def asymmetry_diagnostic(rer_plus, rer_minus, fim_quadratic, stderr_plus=0.0, stderr_minus=0.0,
                         n_sigma: float = 2.0) -> AsymmetryReport:
    """Split +/- RER into the odd (third-order) part and the even residual.

    The odd part is flagged when it exceeds ``n_sigma`` times its standard
    error, propagated from the two RER errors.
    """
    odd = 0.5 * (rer_plus - rer_minus)
    even = 0.5 * (rer_plus + rer_minus) - fim_quadratic
    se = 0.5 * float(np.hypot(stderr_plus, stderr_minus))
    return AsymmetryReport(float(odd), float(even), se, bool(abs(odd) > n_sigma * se))
