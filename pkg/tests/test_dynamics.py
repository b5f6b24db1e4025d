import numpy as np
import pytest

from pathsens.dynamics import (
    CounterNoise,
    LangevinConfig,
    TrajectoryWriter,
    bbk_step,
    box_from_density,
    fluctuation_dissipation,
    init_lattice,
    maxwell_boltzmann,
    read_trajectory,
    run_trajectory,
    total_force,
)
from pathsens.dynamics.init import fcc_positions
from pathsens.errors import ConfigurationError, DivergenceError
from pathsens.forcefield import ForceField, lj_fluid, lj_parameters
from pathsens.harness.models import FreeForceField, HarmonicForceField, ou_stationary_covariance

from conftest import make_state


def _quiet(gamma=0.0, dt=0.1, alpha=0.0, n_steps=0):
    return LangevinConfig(beta=1.0, gamma=gamma, dt=dt, n_steps=n_steps, nonconservative_y_force=alpha,
                          thermal_noise=False)


def test_fluctuation_dissipation():
    assert fluctuation_dissipation(2.0, 1.0) == pytest.approx(1.0)
    assert np.allclose(fluctuation_dissipation(1.0, np.array([0.5, 2.0])), [1.0, 2.0])
    with pytest.raises(ConfigurationError):
        fluctuation_dissipation(0.0, 1.0)


def test_free_flight_step():
    state = make_state([[1.0, 1.0, 1.0]], p=[[1.0, 0.0, 0.0]])
    new = bbk_step(state, FreeForceField(1), _quiet(), CounterNoise(0))
    assert new.q[0] == pytest.approx([1.1, 1.0, 1.0])
    assert new.p[0] == pytest.approx([1.0, 0.0, 0.0])
    assert new.step == 1 and new.t == pytest.approx(0.1)


def test_friction_without_force_or_noise():
    # p_half = 1 - 0.05 = 0.95, then p1 = 0.95 / 1.05
    state = make_state([[1.0, 1.0, 1.0]], p=[[1.0, 0.0, 0.0]])
    new = bbk_step(state, FreeForceField(1), _quiet(gamma=1.0), CounterNoise(0))
    assert new.p[0, 0] == pytest.approx(0.95 / 1.05)
    assert new.q[0, 0] == pytest.approx(1.0 + 0.1 * 0.95)


def test_harmonic_step_by_hand():
    ff = HarmonicForceField(1, k=1.0, box=20.0)
    state = make_state([[10.5, 10.0, 10.0]])
    new = bbk_step(state, ff, _quiet(), CounterNoise(0))
    assert new.q[0, 0] - 10.0 == pytest.approx(0.4975)
    assert new.p[0, 0] == pytest.approx(-0.025 - 0.05 * 0.4975)


def test_constant_drive_reaches_terminal_velocity():
    ff = FreeForceField(3)
    state = make_state(np.full((3, 3), 5.0))
    cfg = _quiet(gamma=0.5, dt=0.05, alpha=1.0)
    for _ in range(2000):
        state = bbk_step(state, ff, cfg, CounterNoise(0))
    assert np.allclose(state.p[:, 1], 2.0, rtol=1e-6)
    assert np.allclose(state.p[:, [0, 2]], 0.0)


def test_total_force_adds_drive_along_y_only():
    ev = FreeForceField(2).evaluate(make_state(np.ones((2, 3))))
    f = total_force(ev, _quiet(alpha=0.7))
    assert np.allclose(f, [[0, 0.7, 0], [0, 0.7, 0]])
    assert np.all(ev.forces == 0)


def test_wrapping_keeps_unwrapped_path():
    state = make_state([[19.95, 0.02, 5.0]], p=[[1.0, -1.0, 0.0]])
    new = bbk_step(state, FreeForceField(1), _quiet(), CounterNoise(0))
    assert np.all((new.q >= 0) & (new.q < new.box))
    assert new.unwrapped()[0] == pytest.approx([20.05, -0.08, 5.0])
    assert list(new.images[0]) == [1, -1, 0]


def _lj_system(n=108, T=0.85):
    L = box_from_density(n, 0.7)
    topo = lj_fluid(n, r_cut=min(2.5, 0.49 * L))
    state = init_lattice(topo, L, 1 / T, CounterNoise(5).generator(0))
    return topo, ForceField(topo, lj_parameters()), state


def test_momentum_conserved_without_thermostat():
    topo, ff, state = _lj_system()
    p0 = state.p.sum(axis=0)
    cfg = _quiet(dt=0.002, n_steps=100)
    out = run_trajectory(state, ff, cfg)
    assert np.allclose(out["state"].p.sum(axis=0), p0, atol=1e-10)


def test_energy_error_is_bounded_and_second_order():
    # the truncated LJ jumps at r_cut, so use the smooth harmonic model
    errs = []
    for dt in (0.1, 0.05):
        ff = HarmonicForceField(1, k=1.0, box=20.0)
        state = make_state([[11.0, 10.0, 10.0]], p=[[0.0, 0.5, 0.0]])
        e0 = 0.5 * 1.0 + 0.125
        worst = 0.0
        for _ in range(int(round(20 / dt))):
            state = bbk_step(state, ff, _quiet(dt=dt), CounterNoise(0))
            worst = max(worst, abs(state.kinetic_energy() + state.evaluation.potential_energy - e0))
        errs.append(worst)
    assert errs[0] < 0.01
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_thermostat_reaches_target_temperature():
    topo, ff, state = _lj_system()
    cfg = LangevinConfig(beta=1 / 0.85, gamma=1.0, dt=0.002, n_steps=1500, n_equil=2500, seed=3)

    class Temps:
        values = []

        def observe(self, step, st):
            self.values.append(st.kinetic_temperature())

    sink = Temps()
    run_trajectory(state, ff, cfg, [sink])
    assert np.mean(sink.values) == pytest.approx(0.85, rel=0.03)


def test_same_seed_same_trajectory():
    topo, ff, state = _lj_system(32)
    cfg = LangevinConfig(beta=1.0, gamma=1.0, dt=0.002, n_steps=50, seed=42)
    a = run_trajectory(state.copy(), ff, cfg)["state"]
    b = run_trajectory(state.copy(), ForceField(topo, lj_parameters()), cfg)["state"]
    assert np.array_equal(a.q, b.q) and np.array_equal(a.p, b.p)
    c = run_trajectory(state.copy(), ff, LangevinConfig(beta=1.0, gamma=1.0, dt=0.002, n_steps=50,
                                                        seed=43))["state"]
    assert not np.array_equal(a.q, c.q)


def test_segmented_run_matches_single_run():
    topo, ff, state = _lj_system(32)
    full = run_trajectory(state.copy(), ff, LangevinConfig(1.0, 1.0, 0.002, 40, 0, 7))["state"]
    half = run_trajectory(state.copy(), ff, LangevinConfig(1.0, 1.0, 0.002, 20, 0, 7))["state"]
    rest = run_trajectory(half, ff, LangevinConfig(1.0, 1.0, 0.002, 20, 0, 7))["state"]
    assert np.array_equal(full.q, rest.q) and np.array_equal(full.p, rest.p)


def test_counter_noise_is_a_pure_function():
    noise = CounterNoise(11)
    a = noise.normals(5, 1, 10)
    noise.normals(6, 0, 10)
    assert np.array_equal(a, CounterNoise(11).normals(5, 1, 10))
    assert not np.array_equal(a, noise.normals(5, 0, 10))
    assert not np.array_equal(a, noise.normals(4, 1, 10))
    # atom i always gets row i, whatever the atom count
    assert np.array_equal(noise.normals(5, 1, 4), a[:4])


def test_counter_noise_statistics():
    x = np.concatenate([CounterNoise(3).normals(s, 0, 1000).ravel() for s in range(20)])
    assert abs(x.mean()) < 0.02 and abs(x.std() - 1) < 0.02


def test_ou_variance_matches_discrete_lyapunov():
    k, gamma, dt = 1.0, 1.0, 0.2
    n = 2000
    ff = HarmonicForceField(n, k, 1000.0)
    state = make_state(np.full((n, 3), 500.0), L=1000.0)
    cfg = LangevinConfig(1.0, gamma, dt, 3000, 200, 1)
    xs = []

    class Sample:
        def observe(self, step, st):
            if step % 10 == 0:
                xs.append((st.unwrapped() - 500.0).ravel())

    run_trajectory(state, ff, cfg, [Sample()])
    var = np.var(np.array(xs))
    want = ou_stationary_covariance(k, gamma, 1.0, dt)[0, 0]
    assert var == pytest.approx(want, rel=0.01)
    assert want == pytest.approx(1.0202, abs=2e-4)


def test_ou_covariance_tends_to_gibbs():
    cov = ou_stationary_covariance(2.0, 1.0, 0.5, 1e-4)
    assert cov[0, 0] == pytest.approx(1 / (0.5 * 2.0), rel=1e-6)
    assert cov[1, 1] == pytest.approx(1 / 0.5, rel=1e-3)


def test_non_finite_state_raises_divergence():
    state = make_state([[1.0, 1.0, 1.0]], p=[[np.nan, 0, 0]])
    with pytest.raises(DivergenceError) as info:
        bbk_step(state, FreeForceField(1), _quiet(), CounterNoise(0))
    assert info.value.step == 1


def test_blown_up_lj_run_raises_divergence():
    topo, ff, state = _lj_system(32)
    state.p *= 1e4
    with pytest.raises(DivergenceError):
        run_trajectory(state, ff, LangevinConfig(1.0, 1.0, 0.05, 200, 0, 0))


def test_langevin_config_validation():
    with pytest.raises(ConfigurationError):
        LangevinConfig(beta=-1.0)
    with pytest.raises(ConfigurationError):
        LangevinConfig(beta=1.0, dt=0.0)
    with pytest.raises(ConfigurationError):
        LangevinConfig(beta=1.0, gamma=0.0).inv_diffusion(3)
    cfg = LangevinConfig(beta=2.0, gamma=np.array([1.0, 4.0]))
    assert np.allclose(cfg.inv_diffusion(2), [1.0, 0.25])
    with pytest.raises(ConfigurationError):
        cfg.gamma_per_atom(3)


def test_maxwell_boltzmann_moments():
    m = np.tile([1.0, 4.0], 20000)
    p = maxwell_boltzmann(m, 2.0, np.random.default_rng(0))
    assert np.allclose(p.sum(axis=0), 0, atol=1e-8)
    assert np.var(p[m == 1.0]) == pytest.approx(0.5, rel=0.02)
    assert np.var(p[m == 4.0]) == pytest.approx(2.0, rel=0.02)


@pytest.mark.parametrize("n", [108, 512, 100])
def test_lattice_sites_are_distinct_and_inside(n):
    L = box_from_density(n, 0.7)
    q = fcc_positions(n, L)
    assert q.shape == (n, 3)
    assert np.all((q >= 0) & (q < L))
    d = q[:, None] - q[None]
    d -= L * np.round(d / L)
    r = np.linalg.norm(d, axis=-1) + np.eye(n) * 10
    assert r.min() > 0.8


def test_density_must_match_box():
    topo = lj_fluid(32, r_cut=2.0)
    with pytest.raises(ConfigurationError):
        init_lattice(topo, 5.0, 1.0, np.random.default_rng(0), density=0.7)


def test_trajectory_round_trip(tmp_path):
    state = make_state([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], p=[[0.1, 0, 0], [0, 0.2, 0]])
    w = TrajectoryWriter(tmp_path / "t.txt", ["A", "B"], stride=1)
    w.observe(0, state)
    w.observe(1, state)
    w.close()
    frames = list(read_trajectory(tmp_path / "t.txt"))
    assert len(frames) == 2
    box, species, q, p = frames[1]
    assert box == 20.0 and species == ["A", "B"]
    assert np.allclose(q, state.q) and np.allclose(p, state.p)
