"""BBK Langevin dynamics, initialisation and trajectory driving."""

from .init import box_from_density, init_lattice, maxwell_boltzmann
from .integrator import LangevinConfig, bbk_step, fluctuation_dissipation, total_force
from .rng import CounterNoise
from .run import Sink, TrajectoryWriter, read_trajectory, run_trajectory
from .state import SystemState, wrap_positions

__all__ = [
    "CounterNoise", "LangevinConfig", "Sink", "SystemState", "TrajectoryWriter",
    "bbk_step", "box_from_density", "fluctuation_dissipation", "init_lattice",
    "maxwell_boltzmann", "read_trajectory", "run_trajectory", "total_force", "wrap_positions",
]
