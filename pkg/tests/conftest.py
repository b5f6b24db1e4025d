import sys

import numpy as np
import pytest

from pathsens.dynamics import CounterNoise, SystemState, init_lattice
from pathsens.forcefield import lj_fluid, lj_parameters, methane, methane_parameters


def jittered(state, scale, seed=0):
    rng = np.random.default_rng(seed)
    out = state.copy()
    out.q = np.mod(out.q + scale * rng.standard_normal(out.q.shape), out.box)
    out.evaluation = None
    return out


@pytest.fixture
def lj_small():
    """108 LJ atoms at rho = 0.7, slightly disordered; r_cut 2.5."""
    topo = lj_fluid(108, r_cut=2.5)
    theta = lj_parameters()
    L = (108 / 0.7) ** (1 / 3)
    state = init_lattice(topo, L, 1 / 0.85, CounterNoise(1).generator(0))
    return topo, theta, jittered(state, 0.05)


@pytest.fixture
def methane_small():
    """27 methane molecules with thermally distorted geometry; r_cut 7 A."""
    topo = methane(27, r_cut=7.0)
    theta = methane_parameters()
    L = 15.0
    state = init_lattice(topo, L, 1.0, CounterNoise(2).generator(0))
    return topo, theta, jittered(state, 0.03, seed=3)


def make_state(q, L=20.0, masses=None, p=None):
    q = np.atleast_2d(np.asarray(q, dtype=float))
    masses = np.ones(len(q)) if masses is None else np.asarray(masses, dtype=float)
    p = np.zeros_like(q) if p is None else np.asarray(p, dtype=float)
    return SystemState(q, p, L, masses)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
