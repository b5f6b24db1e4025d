"""Trajectory driver and trajectory output."""

from __future__ import annotations

import logging
import time

import numpy as np

from ..errors import DivergenceError
from ..forcefield.potentials import minimum_image
from .integrator import LangevinConfig, bbk_step
from .rng import CounterNoise
from .state import SystemState

log = logging.getLogger(__name__)


class Sink:
    """Receives production states.

    ``observe`` is called after every production step with the step index
    (1-based within production) and the new state; sinks must not mutate it.
    """

    def observe(self, step: int, state: SystemState) -> None:  # pragma: no cover - interface
        raise NotImplementedError


def _diagnostics(state: SystemState) -> dict:
    out = {}
    if state.evaluation is not None:
        out["max_force"] = float(np.nanmax(np.abs(state.evaluation.forces)))
    if state.n_atoms <= 4096:
        q = state.q
        d = minimum_image(q[:, None, :] - q[None, :, :], state.box)
        r2 = np.einsum("ijk,ijk->ij", d, d)
        np.fill_diagonal(r2, np.inf)
        out["min_pair_distance"] = float(np.sqrt(np.nanmin(r2)))
    return out


def run_trajectory(state: SystemState, forcefield, cfg: LangevinConfig, sinks=(), noise=None,
                   progress_every: int = 0) -> dict:
    """Equilibrate for ``cfg.n_equil`` steps, then run ``cfg.n_steps`` production steps.

    Returns a summary dict holding the final state, step counts and timing.
    """
    noise = noise or CounterNoise(cfg.seed)
    if state.evaluation is None:
        state.evaluation = forcefield.evaluate(state)
    t0 = time.perf_counter()
    last = state
    try:
        for k in range(cfg.n_equil):
            last = state
            state = bbk_step(state, forcefield, cfg, noise)
        equilibrated = state
        for k in range(1, cfg.n_steps + 1):
            last = state
            state = bbk_step(state, forcefield, cfg, noise)
            for sink in sinks:
                sink.observe(k, state)
            if progress_every and k % progress_every == 0:
                log.info("step %d/%d  T_kin=%.4f  U=%.5g", k, cfg.n_steps,
                         state.kinetic_temperature(), state.evaluation.potential_energy)
    except DivergenceError as exc:
        exc.diagnostics.update(_diagnostics(last))
        raise
    return {
        "state": state,
        "equilibrated_state": equilibrated,
        "n_equil": cfg.n_equil,
        "n_steps": cfg.n_steps,
        "force_evaluations": getattr(forcefield, "n_evaluations", None),
        "wall_time": time.perf_counter() - t0,
    }


class TrajectoryWriter(Sink):
    """Plain-text frames: atom count, box, then ``species x y z px py pz`` per atom."""

    def __init__(self, path, species, stride: int = 100):
        self.path = path
        self.species = list(species)
        self.stride = int(stride)
        self._fh = open(path, "w")

    def observe(self, step, state):
        if step % self.stride:
            return
        fh = self._fh
        fh.write(f"{state.n_atoms}\n{state.box:.10g} step={step} t={state.t:.8g}\n")
        for s, q, p in zip(self.species, state.q, state.p):
            fh.write(f"{s} {q[0]:.8f} {q[1]:.8f} {q[2]:.8f} {p[0]:.8f} {p[1]:.8f} {p[2]:.8f}\n")

    def close(self):
        self._fh.close()


def read_trajectory(path):
    """Yield (box, species, q, p) frames written by TrajectoryWriter."""
    with open(path) as fh:
        while True:
            head = fh.readline()
            if not head.strip():
                return
            n = int(head)
            box = float(fh.readline().split()[0])
            rows = [fh.readline().split() for _ in range(n)]
            species = [r[0] for r in rows]
            data = np.array([[float(x) for x in r[1:]] for r in rows])
            yield box, species, data[:, :3], data[:, 3:]
