"""Analytically tractable toy models used as oracles.

Both live in a large periodic box with no pair interactions, so the generic
integrator, sinks and wrapping machinery run unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..forcefield import ForceEvaluation, ParameterVector


@dataclass(frozen=True)
class ToyTopology:
    name: str
    masses: np.ndarray

    @property
    def n_atoms(self) -> int:
        return len(self.masses)

    @property
    def n_molecules(self) -> int:
        return self.n_atoms

    @property
    def molecule(self) -> np.ndarray:
        return np.arange(self.n_atoms)

    @property
    def type_names(self):
        return ("A",)

    bonds = np.zeros((0, 2), dtype=np.int64)
    angles = np.zeros((0, 3), dtype=np.int64)
    pair_classes = ()

    def pair_tables(self, theta):
        return None

    def pair_class_counts(self):
        return np.zeros(0, dtype=np.int64)


class HarmonicForceField:
    """Independent particles in V = k/2 |q - c|^2 with c the box centre (OU in position).

    The single parameter is the stiffness ``k``; forces are linear in it.
    """

    def __init__(self, n_atoms: int, k: float, box: float, mass: float = 1.0):
        self.topo = ToyTopology("ou-oracle", np.full(n_atoms, float(mass)))
        self.theta = ParameterVector.from_items([("k", k, "energy/length^2")])
        self.centre = 0.5 * box
        self.n_evaluations = 0

    def _disp(self, state):
        return state.unwrapped() - self.centre

    def evaluate(self, state) -> ForceEvaluation:
        self.n_evaluations += 1
        x = self._disp(state)
        k = self.theta["k"]
        return ForceEvaluation(-k * x, 0.5 * k * float(np.sum(x * x)), 0.0)

    def jacobian(self, state) -> np.ndarray:
        return (-self._disp(state)).reshape(-1, 1)

    def differences(self, state, alternatives) -> np.ndarray:
        x = self._disp(state)
        return np.stack([-(th["k"] - self.theta["k"]) * x for th, _ in alternatives])


class FreeForceField:
    """No forces at all; Langevin particles diffuse with D = 1 / (beta gamma)."""

    def __init__(self, n_atoms: int, mass: float = 1.0):
        self.topo = ToyTopology("free-particle", np.full(n_atoms, float(mass)))
        self.theta = ParameterVector.from_items([("k", 1.0, "")])
        self.n_evaluations = 0

    def evaluate(self, state) -> ForceEvaluation:
        self.n_evaluations += 1
        return ForceEvaluation(np.zeros_like(state.q), 0.0, 0.0)

    def jacobian(self, state) -> np.ndarray:
        return np.zeros((state.q.size, 1))

    def differences(self, state, alternatives) -> np.ndarray:
        return np.zeros((len(alternatives),) + state.q.shape)


def ou_stationary_covariance(k: float, gamma: float, beta: float, dt: float, mass: float = 1.0) -> np.ndarray:
    """Exact stationary covariance of (q, p) for the BBK chain on V = k q^2 / 2 (one dof).

    BBK is linear here, z' = A z + B xi, so the covariance solves the discrete
    Lyapunov equation S = A S A^T + B B^T.
    """
    from scipy.linalg import solve_discrete_lyapunov

    h, m, g = dt, mass, gamma
    sig = np.sqrt(2.0 * g / beta)
    c = 1.0 / (1.0 + 0.5 * h * g / m)
    # p_half = a11 q + a12 p + s xi1
    a_half = np.array([-0.5 * h * k, 1.0 - 0.5 * h * g / m])
    s = sig * np.sqrt(0.5 * h)
    # q1 = q + h p_half / m
    q_row = np.array([1.0, 0.0]) + h / m * a_half
    q_noise = np.array([h / m * s, 0.0])
    # p1 = c (p_half - k q1 h/2 + s xi2)
    p_row = c * (a_half - 0.5 * h * k * q_row)
    p_noise = c * (np.array([s, 0.0]) - 0.5 * h * k * q_noise + np.array([0.0, s]))
    A = np.vstack([q_row, p_row])
    B = np.vstack([q_noise, p_noise])
    return solve_discrete_lyapunov(A, B @ B.T)
