"""Force-field parameter containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class Parameter:
    name: str
    value: float
    unit: str = ""


def _check_domain(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise DomainError(f"parameter {name} is not finite: {value}")
    if name == "theta_0":
        if not 0.0 < value < math.pi:
            raise DomainError(f"theta_0 must lie in (0, pi), got {value}")
    elif name.split("_")[0] in ("epsilon", "sigma") or name in ("K_b", "r_0", "K_theta"):
        if value <= 0.0:
            raise DomainError(f"parameter {name} must be positive, got {value}")


@dataclass(frozen=True)
class ParameterVector:
    """Ordered force-field parameters theta.

    Names follow a fixed vocabulary: ``epsilon``/``sigma`` (single species) or
    ``epsilon_XY``/``sigma_XY`` per pair class, and ``K_b``, ``r_0``,
    ``K_theta``, ``theta_0`` for the harmonic bonded terms.
    """

    entries: tuple[Parameter, ...]

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ConfigurationError("parameter vector must not be empty", "parameters")
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"duplicate parameter names in {names}", "parameters")
        for e in self.entries:
            _check_domain(e.name, e.value)

    @classmethod
    def from_items(cls, items: Iterable[tuple], units: dict | None = None) -> "ParameterVector":
        units = units or {}
        entries = []
        for item in items:
            name, value = item[0], float(item[1])
            unit = item[2] if len(item) > 2 else units.get(name, "")
            entries.append(Parameter(name, value, unit))
        return cls(tuple(entries))

    @property
    def K(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries], dtype=float)

    def index(self, name: str) -> int:
        for k, e in enumerate(self.entries):
            if e.name == name:
                return k
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(e.name == name for e in self.entries)

    def __getitem__(self, name: str) -> float:
        return self.entries[self.index(name)].value

    def get(self, name: str, default=None):
        return self[name] if name in self else default

    def with_values(self, values: Sequence[float]) -> "ParameterVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (self.K,):
            raise ConfigurationError(f"expected {self.K} values, got shape {values.shape}")
        return ParameterVector(
            tuple(Parameter(e.name, float(v), e.unit) for e, v in zip(self.entries, values))
        )

    def replace(self, **updates: float) -> "ParameterVector":
        unknown = set(updates) - set(self.names)
        if unknown:
            raise KeyError(f"unknown parameters {sorted(unknown)}")
        return ParameterVector(
            tuple(Parameter(e.name, float(updates.get(e.name, e.value)), e.unit) for e in self.entries)
        )

    def shifted(self, deltas: Sequence[float]) -> "ParameterVector":
        return self.with_values(self.values + np.asarray(deltas, dtype=float))


@dataclass(frozen=True)
class LJPairClass:
    """Truncated (not shifted) LJ interaction between two atom types."""

    epsilon: float
    sigma: float
    r_cut: float
    species_pair: tuple[str, str] = ("A", "A")

    def __post_init__(self):
        if self.epsilon <= 0 or self.sigma <= 0:
            raise DomainError("LJ epsilon and sigma must be positive")
        if self.r_cut <= self.sigma:
            raise DomainError(f"r_cut ({self.r_cut}) must exceed sigma ({self.sigma})")


@dataclass(frozen=True)
class BondTerm:
    i: int
    j: int
    K_b: float
    r_0: float


@dataclass(frozen=True)
class AngleTerm:
    """Harmonic angle j-i-k with ``i`` the apex atom; ``theta_0`` in radians."""

    j: int
    i: int
    k: int
    K_theta: float
    theta_0: float


@dataclass(frozen=True)
class PairTables:
    """Per-type-pair LJ tables consumed by the compiled kernels."""

    epsilon: np.ndarray
    sigma: np.ndarray
    r_cut: np.ndarray
    class_index: np.ndarray = field(repr=False)

    @property
    def max_cut(self) -> float:
        return float(self.r_cut.max())
