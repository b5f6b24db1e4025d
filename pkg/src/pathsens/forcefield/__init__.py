"""Truncated LJ, harmonic bonds and angles with analytic parameter Jacobians."""

from .evaluate import (
    ForceEvaluation,
    ForceField,
    NeighborList,
    compute_forces,
    force_differences,
    param_jacobian,
)
from .params import AngleTerm, BondTerm, LJPairClass, Parameter, ParameterVector
from .potentials import angle_force, bond_force, lj_pair, minimum_image
from .topology import (
    PairClassSpec,
    Topology,
    lj_fluid,
    lj_parameters,
    methane,
    methane_parameters,
)

__all__ = [
    "AngleTerm", "BondTerm", "ForceEvaluation", "ForceField", "LJPairClass", "NeighborList",
    "PairClassSpec", "Parameter", "ParameterVector", "Topology", "angle_force",
    "bond_force", "compute_forces", "force_differences", "lj_fluid", "lj_pair",
    "lj_parameters", "methane", "methane_parameters", "minimum_image", "param_jacobian",
]
