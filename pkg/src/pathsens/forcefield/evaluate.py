"""System-level force, virial, force-difference and parameter-Jacobian evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, InvalidGeometryError
from . import kernels
from .params import ParameterVector
from .potentials import OVERLAP_TOL, angle_terms, bond_terms, minimum_image
from .topology import Topology

BONDED_NAMES = ("K_b", "r_0", "K_theta", "theta_0")


@dataclass
class ForceEvaluation:
    forces: np.ndarray
    potential_energy: float
    virial: float


class NeighborList:
    """Verlet half list built through cell lists, with a displacement skin."""

    def __init__(self, r_cut: float, skin: float):
        self.r_cut = float(r_cut)
        self.skin = float(skin)
        self.pairs = None
        self._ref = None
        self._box = None
        self.n_builds = 0

    def get(self, q, L, molecule, exclude_same):
        if self.pairs is None or L != self._box or self._moved_too_far(q, L):
            rlist = min(self.r_cut + self.skin, max(self.r_cut, L / 2))
            self._eff_skin = rlist - self.r_cut
            self.pairs = kernels.build_pair_list(q, L, rlist, molecule, exclude_same)
            self._ref = q.copy()
            self._box = L
            self.n_builds += 1
        return self.pairs

    def _moved_too_far(self, q, L):
        d = minimum_image(q - self._ref, L)
        return np.max(np.einsum("ij,ij->i", d, d)) >= (0.5 * self._eff_skin) ** 2


def _check_overlap(min_r2):
    if min_r2 < OVERLAP_TOL**2:
        raise InvalidGeometryError(f"atoms overlap (r = {np.sqrt(min_r2):.3g})")


def _positions(state):
    q = np.asarray(state.q, dtype=float)
    if q.ndim != 2 or q.shape[1] != 3:
        raise ContractError(f"positions must have shape (N, 3), got {q.shape}")
    L = float(state.box)
    if not L > 0:
        raise ContractError(f"box length must be positive, got {L}")
    if q.size and (q.min() < 0.0 or q.max() >= L):
        q = np.mod(q, L)
        q[q >= L] -= L
    return np.ascontiguousarray(q), L


def _pairs(q, L, topo, r_cut, neighbors=None):
    if neighbors is not None and neighbors.r_cut >= r_cut:
        return neighbors.get(q, L, topo.molecule, topo.exclude_intramolecular)
    return kernels.build_pair_list(q, L, r_cut, topo.molecule, topo.exclude_intramolecular)


def _bonded(q, L, topo, theta):
    n = topo.n_atoms
    out = []
    if len(topo.bonds):
        out.append(bond_terms(q, L, topo.bonds, theta["K_b"], theta["r_0"], n))
    if len(topo.angles):
        out.append(angle_terms(q, L, topo.angles, theta["K_theta"], theta["theta_0"], n))
    return out


def compute_forces(state, topo: Topology, theta: ParameterVector, neighbors=None) -> ForceEvaluation:
    """Total conservative forces, potential energy and virial.

    LJ acts only between atoms of different molecules when the topology
    excludes intramolecular pairs (methane); bonds and angles are added on top.
    """
    q, L = _positions(state)
    if q.shape[0] != topo.n_atoms:
        raise ContractError(f"{q.shape[0]} positions for {topo.n_atoms} atoms")
    if topo.max_cut > L / 2:
        raise ContractError(f"cutoff {topo.max_cut} exceeds half box {L / 2}")
    tables = topo.pair_tables(theta)
    pi, pj = _pairs(q, L, topo, topo.max_cut, neighbors)
    forces, energy, virial, min_r2 = kernels.pair_forces(
        q, L, pi, pj, topo.types, tables.epsilon, tables.sigma, tables.r_cut)
    _check_overlap(min_r2)
    for f, e, w, *_ in _bonded(q, L, topo, theta):
        forces += f
        energy += e
        virial += w
    return ForceEvaluation(forces, float(energy), float(virial))


def param_jacobian(state, topo: Topology, theta: ParameterVector, neighbors=None) -> np.ndarray:
    """Analytic dF/dtheta as a (3N, K) matrix, rows ordered atom-major (x, y, z)."""
    q, L = _positions(state)
    n = topo.n_atoms
    tables = topo.pair_tables(theta)
    pi, pj = _pairs(q, L, topo, topo.max_cut, neighbors)
    lj = kernels.pair_jacobian(q, L, pi, pj, topo.types, tables.epsilon, tables.sigma,
                               tables.r_cut, tables.class_index, len(topo.pair_classes))
    columns = {}
    for c, pc in enumerate(topo.pair_classes):
        columns[pc.epsilon_name] = lj[:, :, 2 * c]
        columns[pc.sigma_name] = lj[:, :, 2 * c + 1]
    if len(topo.bonds):
        _, _, _, d_kb, d_r0 = bond_terms(q, L, topo.bonds, theta["K_b"], theta["r_0"], n)
        columns["K_b"], columns["r_0"] = d_kb, d_r0
    if len(topo.angles):
        _, _, _, d_kt, d_t0 = angle_terms(q, L, topo.angles, theta["K_theta"], theta["theta_0"], n)
        columns["K_theta"], columns["theta_0"] = d_kt, d_t0
    jac = np.zeros((3 * n, theta.K))
    for k, name in enumerate(theta.names):
        if name in columns:
            jac[:, k] = columns[name].reshape(-1)
    return jac


def force_differences(state, topo: Topology, theta: ParameterVector, alternatives, neighbors=None):
    """F_alt - F_ref at one configuration for each alternative model.

    ``alternatives`` is a sequence of (theta_alt, topo_alt) pairs; ``topo_alt``
    may differ from ``topo`` only in its cutoffs. Returns an (M, N, 3) array.
    The difference is assembled pair by pair, never as a difference of totals.
    """
    q, L = _positions(state)
    m_alt = len(alternatives)
    n = topo.n_atoms
    out = np.zeros((m_alt, n, 3))
    if m_alt == 0:
        return out
    ref = topo.pair_tables(theta)
    alt_tables = [t.pair_tables(th) for th, t in alternatives]
    lj_changed = [
        not (np.array_equal(a.epsilon, ref.epsilon) and np.array_equal(a.sigma, ref.sigma)
             and np.array_equal(a.r_cut, ref.r_cut))
        for a in alt_tables
    ]
    if any(lj_changed):
        r_search = max(ref.max_cut, *(a.max_cut for a in alt_tables))
        if r_search > L / 2:
            raise ContractError(f"cutoff {r_search} exceeds half box {L / 2}")
        pi, pj = _pairs(q, L, topo, r_search, neighbors)
        eps = np.stack([a.epsilon for a in alt_tables])
        sig = np.stack([a.sigma for a in alt_tables])
        rc = np.stack([a.r_cut for a in alt_tables])
        out += kernels.pair_force_diffs(q, L, pi, pj, topo.types, ref.epsilon, ref.sigma,
                                        ref.r_cut, eps, sig, rc)
    base_bonded = None
    for m, (th, _) in enumerate(alternatives):
        if all(th.get(k) == theta.get(k) for k in BONDED_NAMES):
            continue
        if base_bonded is None:
            base_bonded = _bonded(q, L, topo, theta)
        for (f0, *_), (f1, *_) in zip(base_bonded, _bonded(q, L, topo, th)):
            out[m] += f1 - f0
    return out


class ForceField:
    """Binds a topology and parameters to a persistent neighbour list."""

    def __init__(self, topo: Topology, theta: ParameterVector, skin: float | None = None):
        self.topo = topo
        self.theta = theta
        if skin is None:
            skin = 0.1 * min(pc.r_cut for pc in topo.pair_classes)
        self.neighbors = NeighborList(topo.max_cut, skin)
        self.n_evaluations = 0
        topo.pair_tables(theta)  # validate early

    def evaluate(self, state) -> ForceEvaluation:
        self.n_evaluations += 1
        return compute_forces(state, self.topo, self.theta, self.neighbors)

    def jacobian(self, state) -> np.ndarray:
        return param_jacobian(state, self.topo, self.theta, self.neighbors)

    def differences(self, state, alternatives) -> np.ndarray:
        return force_differences(state, self.topo, self.theta, alternatives, self.neighbors)
