"""Trajectory sink that evaluates every perturbation on the reference path."""

from __future__ import annotations

import numpy as np

from ..dynamics.run import Sink
from ..errors import ConfigurationError
from .accumulators import SensitivityAccumulator


def check_fim_request(alternatives, fim: bool) -> None:
    """The potential is not differentiable in the cutoff, so no FIM for it."""
    if fim and any(a.is_cutoff for a in alternatives):
        raise ConfigurationError(
            "FIM is not available for cutoff perturbations (the potential is not "
            "differentiable in r_cut); request the direct RER only", "perturbations")


class SensitivitySink(Sink):
    """Accumulates RER for each alternative and, optionally, the FIM.

    Samples every ``stride`` production steps. With ``discrete`` the sink also
    evaluates the following step to form the BBK transition-kernel estimators.
    No perturbed trajectory is ever propagated.
    """

    def __init__(self, forcefield, cfg, alternatives, stride: int = 10, fim: bool = True,
                 discrete: bool = False, n_blocks: int = 20):
        check_fim_request(alternatives, fim)
        if stride < 1:
            raise ConfigurationError("must be >= 1", "outputs.sensitivity_stride")
        self.ff = forcefield
        self.cfg = cfg
        self.alternatives = list(alternatives)
        self.stride = int(stride)
        self.fim = fim
        self.discrete = discrete
        n = forcefield.topo.n_atoms
        names = list(forcefield.theta.names) if fim else []
        self.acc = SensitivityAccumulator(cfg.inv_diffusion(n), [a.label for a in self.alternatives],
                                          names, n_blocks=n_blocks)
        self._pending = None
        self.n_difference_passes = 0
        self.n_jacobian_passes = 0

    def _sample(self, state):
        pairs = [(a.theta, a.topo) for a in self.alternatives]
        df = self.ff.differences(state, pairs)
        self.n_difference_passes += 1
        jac = None
        if self.fim:
            jac = self.ff.jacobian(state)
            self.n_jacobian_passes += 1
        return df, jac

    def observe(self, step, state):
        if self._pending is not None:
            df0, jac0 = self._pending
            df1, jac1 = self._sample(state)
            self.acc.add_discrete_rer(df0, df1, self.cfg.dt)
            if self.fim:
                self.acc.add_discrete_fim(jac0, jac1, self.cfg.dt)
            self._pending = None
        if step % self.stride:
            return
        df, jac = self._sample(state)
        self.acc.add_rer(df)
        if self.fim:
            self.acc.add_fim(jac)
        if self.discrete:
            self._pending = (df, jac)

    def eps0_matrix(self) -> np.ndarray:
        return np.array([a.eps0 for a in self.alternatives if a.eps0 is not None])
