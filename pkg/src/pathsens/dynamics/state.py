from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass
class SystemState:
    """Phase-space point of the particle system.

    Positions are kept wrapped into [0, L)^3; ``images`` counts box crossings
    per atom and axis so unwrapped coordinates stay available for the MSD.
    ``evaluation`` caches the conservative force evaluation at ``q``.
    """

    q: np.ndarray
    p: np.ndarray
    box: float
    masses: np.ndarray
    t: float = 0.0
    step: int = 0
    images: np.ndarray = None
    evaluation: object = field(default=None, repr=False)

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.masses = np.asarray(self.masses, dtype=float)
        if self.images is None:
            self.images = np.zeros(self.q.shape, dtype=np.int64)

    @property
    def n_atoms(self) -> int:
        return self.q.shape[0]

    @property
    def volume(self) -> float:
        return self.box**3

    def unwrapped(self) -> np.ndarray:
        return self.q + self.images * self.box

    def kinetic_energy(self) -> float:
        return 0.5 * float(np.sum(self.p * self.p / self.masses[:, None]))

    def kinetic_temperature(self) -> float:
        """2K / (d N k_B), without removing the centre-of-mass degrees of freedom."""
        return 2.0 * self.kinetic_energy() / self.p.size

    def copy(self) -> "SystemState":
        return replace(self, q=self.q.copy(), p=self.p.copy(), images=self.images.copy())


def wrap_positions(q, images, L):
    """Fold ``q`` into [0, L) in place-free fashion, updating image counters."""
    shift = np.floor(q / L).astype(np.int64)
    q = q - shift * L
    # rounding can land exactly on L
    edge = q >= L
    if edge.any():
        q = np.where(edge, q - L, q)
        shift = shift + edge
    return q, images + shift
