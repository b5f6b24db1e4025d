"""Virial pressure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def pressure_sample(state, virial: float, beta: float, volume: float | None = None,
                    kinetic: str = "nominal") -> float:
    """P = rho / beta + vir / Vol.

    With ``kinetic="instantaneous"`` the first term uses 2K / (3 Vol) instead of
    the thermostat temperature.
    """
    vol = state.volume if volume is None else volume
    if kinetic == "instantaneous":
        kin = 2.0 * state.kinetic_energy() / (3.0 * vol)
    else:
        kin = state.n_atoms / (vol * beta)
    return float(kin + virial / vol)


@dataclass
class PressureSeries:
    steps: np.ndarray
    samples: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def std(self) -> float:
        return float(np.std(self.samples))
