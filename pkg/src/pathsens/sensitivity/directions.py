"""Perturbation directions and their realisation as alternative force fields."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..forcefield.params import ParameterVector

DEFAULT_MAGNITUDE = 0.05


@dataclass(frozen=True)
class PerturbationDirection:
    """Parameter perturbation eps0; with ``relative`` the step is theta_i * deltas_i."""

    deltas: tuple
    relative: bool = True
    label: str = ""

    def __post_init__(self):
        if not np.any(np.asarray(self.deltas, dtype=float) != 0.0):
            raise DomainError("perturbation direction needs a nonzero component")

    def eps0(self, theta: ParameterVector) -> np.ndarray:
        d = np.asarray(self.deltas, dtype=float)
        if d.size != theta.K:
            raise DomainError(f"direction has {d.size} components for {theta.K} parameters")
        return d * theta.values if self.relative else d.copy()

    def apply(self, theta: ParameterVector) -> ParameterVector:
        return theta.with_values(theta.values + self.eps0(theta))

    @classmethod
    def single(cls, theta: ParameterVector, name: str, magnitude: float, relative: bool = True):
        d = np.zeros(theta.K)
        d[theta.index(name)] = magnitude
        sign = "+" if magnitude > 0 else "-"
        label = f"{name}:{sign}{abs(magnitude) * 100:g}%" if relative else f"{name}:{magnitude:+g}"
        return cls(tuple(d), relative, label)


@dataclass(frozen=True)
class Alternative:
    """One alternative model evaluated on the reference trajectory.

    ``parameter`` is a parameter name or ``rcut`` (cutoff perturbation, which
    changes the topology only). ``epsilon`` is the signed relative magnitude,
    or the candidate cutoff value for ``rcut``.
    """

    label: str
    parameter: str
    epsilon: float
    theta: ParameterVector
    topo: object
    eps0: np.ndarray | None = None

    @property
    def is_cutoff(self) -> bool:
        return self.parameter == "rcut"

    @property
    def sign(self) -> str:
        if self.is_cutoff:
            return "cutoff"
        return "+" if self.epsilon > 0 else "-"


_PERTURB = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([+-]?)([0-9.eE+-]+)\s*(%?)\s*$")


def parse_perturbation(text: str):
    """Parse ``name:+5%``, ``name:-0.05`` or ``rcut:7`` into (name, value).

    Percent values become relative fractions; ``rcut`` values are cutoffs in
    model length units. A bare ``name:5%`` means both signs and returns a
    list of two entries.
    """
    m = _PERTURB.match(text)
    if not m:
        raise ConfigurationError(f"cannot parse perturbation {text!r}", "perturbations")
    name, sign, num, pct = m.groups()
    try:
        value = float(num)
    except ValueError:
        raise ConfigurationError(f"bad number in {text!r}", "perturbations") from None
    if name == "rcut":
        if sign == "-" or pct:
            raise ConfigurationError("rcut takes a positive cutoff length", "perturbations")
        return [(name, value)]
    if pct:
        value /= 100.0
    if not sign:
        return [(name, value), (name, -value)]
    return [(name, -value if sign == "-" else value)]


def build_alternatives(theta: ParameterVector, topo, perturbations) -> list[Alternative]:
    """Turn (name, value) pairs into Alternatives; checks names and domains."""
    out = []
    for name, value in perturbations:
        if name == "rcut":
            if value <= 0:
                raise ConfigurationError("rcut must be positive", "perturbations")
            alt_topo = topo.with_cutoffs(float(value))
            alt_topo.pair_tables(theta)
            out.append(Alternative(f"rcut:{value:g}", "rcut", float(value), theta, alt_topo))
            continue
        if name not in theta:
            raise ConfigurationError(f"unknown parameter {name!r}; expected one of {theta.names}",
                                     "perturbations")
        if value <= -1.0:
            raise ConfigurationError(f"relative magnitude {value} would make {name} non-positive",
                                     "perturbations")
        if value == 0.0:
            raise ConfigurationError("perturbation magnitude must be nonzero", "perturbations")
        direction = PerturbationDirection.single(theta, name, value)
        try:
            alt_theta = direction.apply(theta)
            topo.pair_tables(alt_theta)
        except (DomainError, ValueError) as exc:
            raise ConfigurationError(str(exc), "perturbations") from exc
        out.append(Alternative(direction.label, name, float(value), alt_theta, topo,
                               direction.eps0(theta)))
    return out
