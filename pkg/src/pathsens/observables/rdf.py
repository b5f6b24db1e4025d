"""Radial distribution function in atomic or molecular centre-of-mass mode."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, ContractError
from ..forcefield import kernels

MODES = ("atomic", "molecular")


def molecular_centres(state, topo) -> np.ndarray:
    """Centres of mass per molecule from unwrapped positions, folded into the box."""
    q = state.unwrapped()
    m = topo.masses
    mol = topo.molecule
    n_mol = topo.n_molecules
    total = np.bincount(mol, weights=m, minlength=n_mol)
    com = np.stack([np.bincount(mol, weights=m * q[:, k], minlength=n_mol) for k in range(3)], axis=1)
    com /= total[:, None]
    com = np.mod(com, state.box)
    com[com >= state.box] -= state.box
    return com


@dataclass
class RdfHistogram:
    bin_width: float
    r_max: float
    mode: str = "atomic"
    counts: np.ndarray = None
    n_frames: int = 0
    n_particles: int = 0
    volume: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}", "observables.rdf.mode")
        if not (self.bin_width > 0 and self.r_max > self.bin_width):
            raise ConfigurationError("need 0 < bin_width < r_max", "observables.rdf")
        # never extend past the requested range (it is usually capped at L/2)
        self.n_bins = int(np.floor(self.r_max / self.bin_width + 1e-9))
        self.r_max = self.n_bins * self.bin_width
        if self.counts is None:
            self.counts = np.zeros(self.n_bins, dtype=np.int64)

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.n_bins + 1) * self.bin_width

    @property
    def centres(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.bin_width

    def merge(self, other: "RdfHistogram") -> "RdfHistogram":
        if (other.n_bins, other.bin_width, other.mode) != (self.n_bins, self.bin_width, self.mode):
            raise ContractError("cannot merge RDF histograms with different binning or mode")
        if self.n_frames and other.n_frames and other.n_particles != self.n_particles:
            raise ContractError("cannot merge RDF histograms over different particle counts")
        out = RdfHistogram(self.bin_width, self.r_max, self.mode, self.counts + other.counts,
                           self.n_frames + other.n_frames, self.n_particles or other.n_particles,
                           self.volume or other.volume)
        return out


def rdf_accumulate(hist: RdfHistogram, state, topo=None) -> RdfHistogram:
    L = state.box
    if hist.r_max > L / 2 + 1e-12:
        raise ConfigurationError(f"r_max {hist.r_max} exceeds half box {L / 2}", "observables.rdf.r_max")
    if hist.mode == "molecular":
        if topo is None:
            raise ContractError("molecular RDF needs the topology")
        pos = molecular_centres(state, topo)
    else:
        pos = np.mod(state.q, L)
        pos[pos >= L] -= L
    hist.counts += kernels.pair_distance_histogram(np.ascontiguousarray(pos), L, hist.r_max, hist.n_bins)
    hist.n_frames += 1
    hist.n_particles = pos.shape[0]
    hist.volume = L**3
    return hist


@dataclass
class RdfTable:
    r: np.ndarray
    g: np.ndarray
    bin_width: float
    mode: str = "atomic"
    meta: dict = field(default_factory=dict)


def rdf_finalize(hist: RdfHistogram, rho: float | None = None, n_particles: int | None = None) -> RdfTable:
    """Normalise counts by ideal-gas pair counts rho * shell volume * N * frames / 2."""
    if hist.n_frames == 0:
        raise ContractError("no frames accumulated")
    n = n_particles or hist.n_particles
    rho = rho if rho is not None else n / hist.volume
    e = hist.edges
    shell = 4.0 / 3.0 * np.pi * (e[1:] ** 3 - e[:-1] ** 3)
    ideal = rho * shell * n * hist.n_frames / 2.0
    return RdfTable(hist.centres, hist.counts / ideal, hist.bin_width, hist.mode,
                    {"n_frames": hist.n_frames, "n_particles": n, "rho": rho})


def rdf_l2_diff(g_ref: RdfTable, g_pert: RdfTable) -> tuple[float, float]:
    """(L2 norm of g_ref - g_pert, relative area difference), trapezoidal in r."""
    if g_ref.r.shape != g_pert.r.shape or not np.allclose(g_ref.r, g_pert.r, rtol=0, atol=1e-12):
        raise ContractError("RDFs must share the same binning")
    diff = g_ref.g - g_pert.g
    l2 = float(np.sqrt(np.trapezoid(diff * diff, g_ref.r)))
    area_ref = float(np.trapezoid(g_ref.g, g_ref.r))
    area_pert = float(np.trapezoid(g_pert.g, g_pert.r))
    rel = (area_ref - area_pert) / area_ref if area_ref else 0.0
    return l2, float(rel)
