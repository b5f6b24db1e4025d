"""System topologies: atom types, molecules, bonded terms and LJ pair classes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from .params import Parameter, PairTables, ParameterVector


@dataclass(frozen=True)
class PairClassSpec:
    """One nonbonded interaction class.

    ``label`` is appended to ``epsilon``/``sigma`` to form the parameter names
    (an empty label means a single-species fluid with plain names).
    """

    label: str
    types: tuple[int, int]
    r_cut: float

    @property
    def epsilon_name(self) -> str:
        return f"epsilon_{self.label}" if self.label else "epsilon"

    @property
    def sigma_name(self) -> str:
        return f"sigma_{self.label}" if self.label else "sigma"


@dataclass(frozen=True)
class Topology:
    type_names: tuple[str, ...]
    types: np.ndarray
    masses: np.ndarray
    molecule: np.ndarray
    pair_classes: tuple[PairClassSpec, ...]
    bonds: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    angles: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))
    exclude_intramolecular: bool = True
    name: str = "custom"

    def __post_init__(self):
        n = len(self.types)
        for arr, label in ((self.masses, "masses"), (self.molecule, "molecule")):
            if len(arr) != n:
                raise ConfigurationError(f"length {len(arr)} != atom count {n}", label)
        if np.any(self.masses <= 0):
            raise ConfigurationError("masses must be positive", "masses")
        for arr, width, label in ((self.bonds, 2, "bonds"), (self.angles, 3, "angles")):
            if arr.size and (arr.ndim != 2 or arr.shape[1] != width):
                raise ConfigurationError(f"expected shape (*, {width})", label)
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise ConfigurationError("atom index out of range", label)
            if arr.size and any(len(set(row)) != width for row in arr.tolist()):
                raise ConfigurationError("atom indices must be distinct", label)
        ntypes = len(self.type_names)
        seen = set()
        for pc in self.pair_classes:
            key = tuple(sorted(pc.types))
            if key in seen or max(key) >= ntypes:
                raise ConfigurationError(f"bad pair class {pc}", "pair_classes")
            seen.add(key)
        if len(seen) != ntypes * (ntypes + 1) // 2:
            raise ConfigurationError("every type pair needs a pair class", "pair_classes")

    @property
    def n_atoms(self) -> int:
        return len(self.types)

    @property
    def n_molecules(self) -> int:
        return int(self.molecule.max()) + 1 if self.n_atoms else 0

    @property
    def max_cut(self) -> float:
        return max(pc.r_cut for pc in self.pair_classes)

    def with_cutoffs(self, r_cut) -> "Topology":
        """Copy with new cutoffs; ``r_cut`` is a float or a {label: value} dict."""
        if not isinstance(r_cut, dict):
            r_cut = {pc.label: float(r_cut) for pc in self.pair_classes}
        classes = tuple(
            PairClassSpec(pc.label, pc.types, float(r_cut.get(pc.label, pc.r_cut)))
            for pc in self.pair_classes
        )
        return Topology(self.type_names, self.types, self.masses, self.molecule, classes,
                        self.bonds, self.angles, self.exclude_intramolecular, self.name)

    def pair_tables(self, theta: ParameterVector) -> PairTables:
        nt = len(self.type_names)
        eps = np.zeros((nt, nt))
        sig = np.ones((nt, nt))
        rc = np.zeros((nt, nt))
        cls = np.zeros((nt, nt), dtype=np.int64)
        for c, pc in enumerate(self.pair_classes):
            a, b = pc.types
            e, s = theta[pc.epsilon_name], theta[pc.sigma_name]
            if pc.r_cut <= s:
                raise ConfigurationError(
                    f"r_cut {pc.r_cut} must exceed sigma {s}", f"pair_classes.{pc.label or 'LJ'}")
            for x, y in ((a, b), (b, a)):
                eps[x, y], sig[x, y], rc[x, y], cls[x, y] = e, s, pc.r_cut, c
        return PairTables(eps, sig, rc, cls)

    def pair_class_counts(self) -> np.ndarray:
        """Number of intermolecular atom pairs in each pair class."""
        counts = np.zeros(len(self.pair_classes), dtype=np.int64)
        n_type = np.bincount(self.types, minlength=len(self.type_names)).astype(np.int64)
        for c, pc in enumerate(self.pair_classes):
            a, b = pc.types
            total = n_type[a] * (n_type[a] - 1) // 2 if a == b else n_type[a] * n_type[b]
            if self.exclude_intramolecular:
                for m in range(self.n_molecules):
                    mt = self.types[self.molecule == m]
                    na, nb = int(np.sum(mt == a)), int(np.sum(mt == b))
                    total -= na * (na - 1) // 2 if a == b else na * nb
            counts[c] = total
        return counts


LJ_UNITS = {"epsilon": "epsilon", "sigma": "sigma"}


def lj_fluid(n_atoms: int, r_cut: float = 4.0, mass: float = 1.0) -> Topology:
    """Single-species LJ fluid; every atom is its own molecule."""
    if n_atoms < 1:
        raise ConfigurationError("need at least one atom", "system.n_atoms")
    return Topology(
        type_names=("A",),
        types=np.zeros(n_atoms, dtype=np.int64),
        masses=np.full(n_atoms, float(mass)),
        molecule=np.arange(n_atoms, dtype=np.int64),
        pair_classes=(PairClassSpec("", (0, 0), float(r_cut)),),
        exclude_intramolecular=False,
        name="lj-fluid",
    )


def lj_parameters(epsilon: float = 1.0, sigma: float = 1.0) -> ParameterVector:
    return ParameterVector((Parameter("epsilon", epsilon, "epsilon"), Parameter("sigma", sigma, "sigma")))


MASS_C = 12.011
MASS_H = 1.008

# DREIDING methane, kcal/mol and Angstrom; K_theta per rad^2
METHANE_DEFAULTS = (
    ("epsilon_CC", 0.0951, "kcal/mol"),
    ("sigma_CC", 3.473, "A"),
    ("epsilon_CH", 0.0380, "kcal/mol"),
    ("sigma_CH", 3.159, "A"),
    ("epsilon_HH", 0.0152, "kcal/mol"),
    ("sigma_HH", 2.846, "A"),
    ("K_b", 700.0, "kcal/mol/A^2"),
    ("r_0", 1.1, "A"),
    ("K_theta", 100.0, "kcal/mol/rad^2"),
    ("theta_0", 1.909, "rad"),
)


def methane_parameters(**overrides: float) -> ParameterVector:
    theta = ParameterVector.from_items(METHANE_DEFAULTS)
    return theta.replace(**overrides) if overrides else theta


def methane(n_molecules: int, r_cut: float = 15.0) -> Topology:
    """All-atom CH4: per molecule atom order C, H, H, H, H; 4 bonds and 6 H-C-H angles."""
    if n_molecules < 1:
        raise ConfigurationError("need at least one molecule", "system.n_molecules")
    types = np.tile(np.array([0, 1, 1, 1, 1], dtype=np.int64), n_molecules)
    masses = np.where(types == 0, MASS_C, MASS_H)
    molecule = np.repeat(np.arange(n_molecules, dtype=np.int64), 5)
    base = 5 * np.arange(n_molecules, dtype=np.int64)[:, None]
    bonds = np.stack([np.zeros(4, dtype=np.int64), np.arange(1, 5)], axis=1)
    bonds = (bonds[None, :, :] + base[:, :, None]).reshape(-1, 2)
    pairs = np.array(list(itertools.combinations(range(1, 5), 2)), dtype=np.int64)
    angles = np.stack([pairs[:, 0], np.zeros(6, dtype=np.int64), pairs[:, 1]], axis=1)
    angles = (angles[None, :, :] + base[:, :, None]).reshape(-1, 3)
    return Topology(
        type_names=("C", "H"),
        types=types,
        masses=masses,
        molecule=molecule,
        pair_classes=(
            PairClassSpec("CC", (0, 0), r_cut),
            PairClassSpec("CH", (0, 1), r_cut),
            PairClassSpec("HH", (1, 1), r_cut),
        ),
        bonds=bonds,
        angles=angles,
        exclude_intramolecular=True,
        name="methane",
    )
