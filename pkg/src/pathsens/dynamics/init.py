"""Initial configurations: fcc lattice for atomic fluids, cubic grid for methane."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import ConfigurationError
from .state import SystemState, wrap_positions

FCC_BASIS = np.array([[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]])
TETRAHEDRON = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)


def box_from_density(n_particles: int, density: float) -> float:
    if density <= 0:
        raise ConfigurationError("density must be positive", "system.density")
    return (n_particles / density) ** (1.0 / 3.0)


def fcc_positions(n_atoms: int, L: float) -> np.ndarray:
    """Lattice sites for ``n_atoms`` in a cubic box.

    A full fcc lattice when n_atoms = 4 n^3, a simple cubic one when it is n^3,
    otherwise the first n_atoms sites of the smallest fcc lattice that holds them.
    """
    if n_atoms < 1:
        raise ConfigurationError("need at least one atom", "system.n_atoms")
    n_fcc = round((n_atoms / 4) ** (1.0 / 3.0))
    n_sc = round(n_atoms ** (1.0 / 3.0))
    if 4 * n_fcc**3 != n_atoms and n_sc**3 == n_atoms:
        a = L / n_sc
        cells = np.array(list(itertools.product(range(n_sc), repeat=3)), dtype=float)
        return (cells + 0.5) * a
    if 4 * n_fcc**3 != n_atoms:
        n_fcc = int(np.ceil((n_atoms / 4) ** (1.0 / 3.0) - 1e-9))
    a = L / n_fcc
    cells = np.array(list(itertools.product(range(n_fcc), repeat=3)), dtype=float)
    pos = (cells[:, None, :] + FCC_BASIS[None, :, :]).reshape(-1, 3) * a
    return pos[:n_atoms] + 0.25 * a


def methane_positions(n_molecules: int, L: float, bond_length: float, rng) -> np.ndarray:
    n_side = int(np.ceil(n_molecules ** (1.0 / 3.0) - 1e-9))
    spacing = L / n_side
    if spacing < 2.0 * bond_length + 1.0:
        raise ConfigurationError(f"grid spacing {spacing:.3g} too small for CH4", "system.box")
    sites = np.array(list(itertools.product(range(n_side), repeat=3))[:n_molecules], dtype=float)
    centres = (sites + 0.5) * spacing
    rot = Rotation.random(n_molecules, random_state=rng).as_matrix()
    hydrogens = np.einsum("mij,hj->mhi", rot, TETRAHEDRON * bond_length) + centres[:, None, :]
    return np.concatenate([centres[:, None, :], hydrogens], axis=1).reshape(-1, 3)


def maxwell_boltzmann(masses, beta: float, rng) -> np.ndarray:
    """Gaussian momenta at inverse temperature beta with zero total momentum."""
    masses = np.asarray(masses, dtype=float)
    p = rng.standard_normal((len(masses), 3)) * np.sqrt(masses / beta)[:, None]
    if len(masses) > 1:
        p -= masses[:, None] * (p.sum(axis=0) / masses.sum())
    return p


def init_lattice(topo, L: float, beta: float, rng, density: float | None = None) -> SystemState:
    """Lattice start with Maxwell-Boltzmann momenta.

    LJ-like topologies (one atom per molecule) go on an fcc lattice; methane
    molecules sit on a cubic grid with random orientations. If ``density`` is
    given it must agree with the box to 1e-3 relative.
    """
    n = topo.n_atoms
    if density is not None:
        count = topo.n_molecules if topo.name == "methane" else n
        if abs(count / L**3 - density) > 1e-3 * density:
            raise ConfigurationError(f"density {density} inconsistent with box {L} for {count} particles",
                                     "system.density")
    if topo.name == "methane":
        q = methane_positions(topo.n_molecules, L, 1.1, rng)
    else:
        q = fcc_positions(n, L)
    q, images = wrap_positions(q, np.zeros(q.shape, dtype=np.int64), L)
    p = maxwell_boltzmann(topo.masses, beta, rng)
    return SystemState(q, p, L, topo.masses.copy(), images=images)
