"""Pair, bond and angle potentials with forces and parameter derivatives.

Scalar functions (``lj_pair``, ``bond_force``, ``angle_force``) act on a
single interaction and validate their geometry; the ``*_terms`` functions are
the vectorised system-wide versions used by the force evaluator.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidGeometryError, SingularAngleError
from .params import AngleTerm, BondTerm, LJPairClass

OVERLAP_TOL = 1e-9
SINGULAR_SIN_TOL = 1e-8


def minimum_image(displacement, L):
    """Map each component of ``displacement`` into [-L/2, L/2)."""
    d = np.asarray(displacement, dtype=float)
    return d - L * np.floor(d / L + 0.5)


def lj_pair(r: float, cls: LJPairClass) -> tuple[float, float]:
    """Energy and radial force -dV/dr of the truncated LJ potential.

    Both are exactly zero for ``r >= cls.r_cut``; no shift is applied, so the
    energy jumps at the cutoff.
    """
    if not r > 0:
        raise InvalidGeometryError(f"pair distance must be positive, got {r}")
    if r >= cls.r_cut:
        return 0.0, 0.0
    s6 = (cls.sigma / r) ** 6
    energy = 4.0 * cls.epsilon * (s6 * s6 - s6)
    force = 24.0 * cls.epsilon * (2.0 * s6 * s6 - s6) / r
    return energy, force


def bond_force(qi, qj, term: BondTerm, L: float | None = None):
    """Harmonic bond 0.5*K_b*(r_0 - r)^2; returns (energy, (f_i, f_j))."""
    u = np.asarray(qj, dtype=float) - np.asarray(qi, dtype=float)
    if L is not None:
        u = minimum_image(u, L)
    r = float(np.linalg.norm(u))
    if r < OVERLAP_TOL:
        raise InvalidGeometryError("coincident bonded atoms")
    energy = 0.5 * term.K_b * (term.r_0 - r) ** 2
    fj = -term.K_b * (r - term.r_0) * u / r
    return energy, (-fj, fj)


def _angle_geometry(u, v):
    ru = np.linalg.norm(u, axis=-1)
    rv = np.linalg.norm(v, axis=-1)
    if np.any(ru < OVERLAP_TOL) or np.any(rv < OVERLAP_TOL):
        raise InvalidGeometryError("degenerate angle arm")
    cos = np.einsum("...k,...k->...", u, v) / (ru * rv)
    cos = np.clip(cos, -1.0, 1.0)
    theta = np.arccos(cos)
    sin = np.sqrt(1.0 - cos * cos)
    if np.any(sin < SINGULAR_SIN_TOL):
        raise SingularAngleError("colinear angle arms")
    # d(cos)/du and d(cos)/dv
    dcu = v / (ru * rv)[..., None] - cos[..., None] * u / (ru * ru)[..., None]
    dcv = u / (ru * rv)[..., None] - cos[..., None] * v / (rv * rv)[..., None]
    return theta, sin, dcu, dcv


def angle_force(qj, qi, qk, term: AngleTerm, L: float | None = None):
    """Harmonic angle 0.5*K_theta*(theta_0 - theta)^2 at apex ``qi``.

    Returns (energy, (f_j, f_i, f_k)).
    """
    qi = np.asarray(qi, dtype=float)
    u = np.asarray(qj, dtype=float) - qi
    v = np.asarray(qk, dtype=float) - qi
    if L is not None:
        u, v = minimum_image(u, L), minimum_image(v, L)
    theta, sin, dcu, dcv = _angle_geometry(u, v)
    energy = 0.5 * term.K_theta * (term.theta_0 - theta) ** 2
    g = term.K_theta * (theta - term.theta_0) / sin
    fj, fk = g * dcu, g * dcv
    return float(energy), (fj, -(fj + fk), fk)


def _scatter(n, idx, vec):
    out = np.zeros((n, 3))
    for k in range(3):
        out[:, k] = np.bincount(idx, weights=vec[:, k], minlength=n)
    return out


def bond_terms(q, L, bonds, K_b, r_0, n_atoms):
    """Vectorised bonds.

    Returns (forces, energy, virial, dF/dK_b, dF/dr_0), each derivative an
    (n_atoms, 3) array.
    """
    i, j = bonds[:, 0], bonds[:, 1]
    u = minimum_image(q[j] - q[i], L)
    r = np.linalg.norm(u, axis=1)
    if np.any(r < OVERLAP_TOL):
        raise InvalidGeometryError("coincident bonded atoms")
    e_hat = u / r[:, None]
    fj = (-K_b * (r - r_0))[:, None] * e_hat
    forces = _scatter(n_atoms, j, fj) - _scatter(n_atoms, i, fj)
    energy = 0.5 * K_b * np.sum((r_0 - r) ** 2)
    virial = np.sum(fj * u) / 3.0
    d_kb = forces / K_b
    g = K_b * e_hat
    d_r0 = _scatter(n_atoms, j, g) - _scatter(n_atoms, i, g)
    return forces, energy, virial, d_kb, d_r0


def angle_terms(q, L, angles, K_theta, theta_0, n_atoms):
    """Vectorised angles (rows j, i, k with apex i); same return layout as bonds."""
    aj, ai, ak = angles[:, 0], angles[:, 1], angles[:, 2]
    u = minimum_image(q[aj] - q[ai], L)
    v = minimum_image(q[ak] - q[ai], L)
    theta, sin, dcu, dcv = _angle_geometry(u, v)
    g = (K_theta * (theta - theta_0) / sin)[:, None]
    fj, fk = g * dcu, g * dcv
    forces = _scatter(n_atoms, aj, fj) + _scatter(n_atoms, ak, fk) - _scatter(n_atoms, ai, fj + fk)
    energy = 0.5 * K_theta * np.sum((theta_0 - theta) ** 2)
    virial = (np.sum(fj * u) + np.sum(fk * v)) / 3.0
    d_kt = forces / K_theta
    h = (-K_theta / sin)[:, None]
    hj, hk = h * dcu, h * dcv
    d_t0 = _scatter(n_atoms, aj, hj) + _scatter(n_atoms, ak, hk) - _scatter(n_atoms, ai, hj + hk)
    return forces, energy, virial, d_kt, d_t0
