"""Experiment orchestration: build a system from a config, run one reference
trajectory with sensitivity and observable sinks attached, and emit CSVs."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .. import units
from ..dynamics import LangevinConfig, SystemState, TrajectoryWriter, init_lattice, run_trajectory
from ..dynamics.init import box_from_density, maxwell_boltzmann
from ..dynamics.rng import CounterNoise
from ..errors import ConfigurationError
from ..forcefield import ForceField, lj_fluid, lj_parameters, methane, methane_parameters
from ..observables import (
    ObservableSink,
    write_msd_csv,
    write_pressure_csv,
    write_rdf_csv,
)
from ..sensitivity import (
    FimReport,
    SensitivitySink,
    asymmetry_diagnostic,
    build_alternatives,
    check_fim_request,
    combine_replicas,
    fim_quadratic_rer,
    rer_rows,
    write_fim_csv,
    write_fim_eig_csv,
    write_rows,
)
from .config import ExperimentConfig, normalize_perturbation
from .models import FreeForceField, HarmonicForceField

log = logging.getLogger(__name__)

TOY_BOX = 1000.0


@dataclass
class System:
    config: ExperimentConfig
    forcefield: object
    state: SystemState
    langevin: LangevinConfig
    beta: float
    pressure_scale: float = 1.0
    length_unit: str = "sigma"
    species: list = field(default_factory=list)

    @property
    def topo(self):
        return self.forcefield.topo

    @property
    def theta(self):
        return self.forcefield.theta


def _theta_overrides(theta, overrides):
    unknown = [k for k in overrides if k not in theta]
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) {unknown}; model has {theta.names}",
                                 f"parameters.{unknown[0]}")
    try:
        return theta.replace(**{k: float(v) for k, v in overrides.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc), "parameters") from None


def _box(s, count, density_unit=""):
    if s["box"] is not None:
        L = s["box"]
        if s["density"] is not None and abs(count / L**3 - s["density"]) > 1e-2 * s["density"]:
            raise ConfigurationError(
                f"density {s['density']}{density_unit} inconsistent with box {L} for {count} particles",
                "system.density")
        return L
    return box_from_density(count, s["density"])


def build_system(cfg: ExperimentConfig) -> System:
    """Topology, parameters, initial state and integrator settings for ``cfg``."""
    s, d = cfg["system"], cfg["dynamics"]
    noise = CounterNoise(d["seed"])
    rng = noise.generator(stream=1)
    model = cfg.model
    if model == "lj-fluid":
        n = s["n_atoms"]
        L = _box(s, n)
        r_cut = s["r_cut"] if s["r_cut"] is not None else 4.0
        if r_cut > L / 2:
            raise ConfigurationError(f"r_cut {r_cut} exceeds half box {L / 2:.4g}", "system.r_cut")
        topo = lj_fluid(n, r_cut, s["mass"])
        theta = _theta_overrides(lj_parameters(), cfg["parameters"])
        beta = 1.0 / s["temperature"]
        lcfg = LangevinConfig(beta, d["gamma"], d["dt"], d["n_steps"], d["n_equil"], d["seed"], d["alpha"])
        ff = ForceField(topo, theta)
        state = init_lattice(topo, L, beta, rng)
        return System(cfg, ff, state, lcfg, beta, 1.0, "sigma", ["A"] * n)
    if model == "methane":
        n_mol = s["n_molecules"]
        L = _box(s, n_mol, " molecules/A^3")
        r_cut = s["r_cut"] if s["r_cut"] is not None else 15.0
        if r_cut > L / 2:
            raise ConfigurationError(f"r_cut {r_cut} exceeds half box {L / 2:.4g}", "system.r_cut")
        topo = methane(n_mol, r_cut)
        theta = _theta_overrides(methane_parameters(), cfg["parameters"])
        beta = units.beta_from_kelvin(s["temperature"])
        gamma = topo.masses * d["gamma"] / units.PS
        lcfg = LangevinConfig(beta, gamma, d["dt"] * units.FS, d["n_steps"], d["n_equil"], d["seed"],
                              d["alpha"])
        ff = ForceField(topo, theta, skin=1.0)
        state = init_lattice(topo, L, beta, rng)
        species = ["C" if t == 0 else "H" for t in topo.types]
        return System(cfg, ff, state, lcfg, beta, units.PRESSURE_ATM, "A", species)
    # toy models live in a large box with no interactions
    n = s["n_atoms"]
    beta = 1.0 / s["temperature"]
    lcfg = LangevinConfig(beta, d["gamma"], d["dt"], d["n_steps"], d["n_equil"], d["seed"], d["alpha"])
    p = maxwell_boltzmann(np.full(n, s["mass"]), beta, rng)
    if model == "ou-oracle":
        k = float(cfg["parameters"].get("k", 1.0))
        ff = HarmonicForceField(n, k, TOY_BOX, s["mass"])
        q = ff.centre + rng.standard_normal((n, 3)) / np.sqrt(beta * k)
    else:
        ff = FreeForceField(n, s["mass"])
        q = rng.uniform(0.0, TOY_BOX, (n, 3))
    state = SystemState(q, p, TOY_BOX, np.full(n, s["mass"]))
    return System(cfg, ff, state, lcfg, beta, 1.0, "length", ["A"] * n)


def perturbation_list(cfg: ExperimentConfig, extra=()) -> list:
    out = []
    for i, p in enumerate(list(cfg["perturbations"]) + list(extra)):
        out.extend(normalize_perturbation(p, f"perturbations[{i}]"))
    return out


@dataclass
class SweepResult:
    """Everything one reference trajectory produced, with provenance."""

    provenance: dict
    labels: list
    alternatives: list
    rer: dict
    fim: FimReport | None
    discrete_rer: dict | None
    discrete_fim: np.ndarray | None
    observables: dict
    rdf: object | None
    msd: object | None
    pressure: object | None
    counters: dict
    rer_rows: list = field(default_factory=list)
    rer_series: np.ndarray | None = None

    def estimate(self, label):
        return self.rer[label]


def run_experiment(cfg: ExperimentConfig, *, sensitivity: bool = True, observables: bool = True,
                   rcut_list=None, out_dir=None, perturbations=None) -> SweepResult:
    """Run one reference trajectory and evaluate every requested quantity on it.

    Parameter perturbations share one sink sampled every ``sensitivity.stride``
    steps; cutoff candidates get a second sink with ``sensitivity.rcut_stride``.
    """
    system = build_system(cfg)
    ff, topo, theta = system.forcefield, system.topo, system.theta
    sc, oc = cfg["sensitivity"], cfg["observables"]
    perts = perturbation_list(cfg) if perturbations is None else perturbations
    rcuts = list(sc["rcut_list"]) if rcut_list is None else list(rcut_list)
    param_perts = [p for p in perts if p[0] != "rcut"]
    rcuts += [v for name, v in perts if name == "rcut"]
    sinks = []
    sens = rc_sink = obs = None
    if sensitivity and (param_perts or sc["fim"]):
        alts = build_alternatives(theta, topo, param_perts)
        sens = SensitivitySink(ff, system.langevin, alts, sc["stride"], sc["fim"], sc["discrete"],
                               sc["n_blocks"])
        sinks.append(sens)
    if sensitivity and rcuts:
        L = system.state.box
        for r in rcuts:
            if r > L / 2:
                raise ConfigurationError(f"cutoff candidate {r} exceeds half box {L / 2:.4g}",
                                         "sensitivity.rcut_list")
        rc_alts = build_alternatives(theta, topo, [("rcut", r) for r in rcuts])
        check_fim_request(rc_alts, False)
        rc_sink = SensitivitySink(ff, system.langevin, rc_alts, sc["rcut_stride"], False, sc["discrete"],
                                  sc["n_blocks"])
        sinks.append(rc_sink)
    if observables and cfg.model in ("lj-fluid", "methane"):
        mode = oc["mode"] or ("molecular" if cfg.model == "methane" else "atomic")
        rdf_bin = oc["rdf_bin"] or (0.05 if cfg.model == "methane" else 0.02)
        obs = ObservableSink(topo, system.beta, system.langevin.dt, rdf_bin, system.state.box / 2, mode,
                             oc["rdf_stride"], oc["msd_stride"], oc["pressure_stride"], system.pressure_scale)
        sinks.append(obs)
    elif observables and cfg.model == "free-particle":
        obs = ObservableSink(topo, system.beta, system.langevin.dt, 1.0, 10.0, "atomic", 0,
                             oc["msd_stride"], 0)
        sinks.append(obs)
    writer = None
    if out_dir and cfg["outputs"]["trajectory_stride"]:
        os.makedirs(out_dir, exist_ok=True)
        writer = TrajectoryWriter(os.path.join(out_dir, "trajectory.txt"), system.species,
                                  cfg["outputs"]["trajectory_stride"])
        sinks.append(writer)
    try:
        summary = run_trajectory(system.state, ff, system.langevin, sinks,
                                 progress_every=cfg["outputs"]["progress_every"])
    finally:
        if writer is not None:
            writer.close()

    prov = cfg.provenance()
    labels, alternatives, rer, rows = [], [], {}, []
    fim_report = disc_rer = disc_fim = None
    series = None
    for sink in (sens, rc_sink):
        if sink is None or not sink.alternatives:
            continue
        est = sink.acc.rer()
        rer.update(est)
        labels += [a.label for a in sink.alternatives]
        alternatives += sink.alternatives
        rows += rer_rows(est, sink.alternatives, topo, sc["normalization"])
        if sink.discrete:
            disc_rer = {**(disc_rer or {}), **sink.acc.discrete_rer()}
    if sens is not None:
        if sens.alternatives:
            series = sens.acc.rer_series()
        if sc["fim"]:
            mean, se = sens.acc.fim()
            fim_report = FimReport.build(theta.names, mean, se, theta.values)
            if sens.discrete:
                disc_fim = sens.acc.discrete_fim()[0]
    counters = {
        "production_steps": summary["n_steps"],
        "equilibration_steps": summary["n_equil"],
        "force_evaluations": summary["force_evaluations"],
        "difference_passes": sum(s.n_difference_passes for s in (sens, rc_sink) if s is not None),
        "jacobian_passes": sens.n_jacobian_passes if sens is not None else 0,
        "wall_time": summary["wall_time"],
    }
    obs_summary, rdf, msd, pressure = {}, None, None, None
    if obs is not None:
        obs_summary = obs.summary()
        if obs.rdf is not None and obs.rdf.n_frames:
            rdf = obs.rdf_table()
        if len(obs._frames) >= 2:
            msd = obs.msd(oc["msd_origin_stride"], oc["msd_max_lag"])
            if len(obs._frames) >= 8:
                obs_summary["diffusion"] = obs.diffusion(oc["msd_origin_stride"], max_lag=oc["msd_max_lag"])
        if obs._p:
            pressure = obs.pressure()
    result = SweepResult(prov, labels, alternatives, rer, fim_report, disc_rer, disc_fim, obs_summary,
                         rdf, msd, pressure, counters, rows, series)
    if out_dir:
        write_outputs(result, out_dir, theta)
    return result


def asymmetry_rows(result: SweepResult, theta) -> list:
    """Odd/even split for every parameter perturbed with both signs at equal size."""
    if result.fim is None:
        return []
    rows = []
    by_key = {(a.parameter, a.epsilon): a for a in result.alternatives if not a.is_cutoff}
    for (name, eps), a in sorted(by_key.items()):
        if eps <= 0 or (name, -eps) not in by_key:
            continue
        b = by_key[(name, -eps)]
        plus, minus = result.rer[a.label], result.rer[b.label]
        quad = fim_quadratic_rer(result.fim.fim, a.eps0)
        rep = asymmetry_diagnostic(plus.mean, minus.mean, quad, plus.stderr, minus.stderr)
        rows.append({"parameter": name, "epsilon": eps, "rer_plus": plus.mean, "rer_minus": minus.mean,
                     "fim_quadratic": quad, "odd": rep.odd, "odd_stderr": rep.odd_stderr,
                     "even_residual": rep.even_residual, "odd_significant": rep.significant})
    return rows


def write_outputs(result: SweepResult, out_dir, theta) -> None:
    os.makedirs(out_dir, exist_ok=True)
    prov = result.provenance
    if result.rer_rows:
        write_rows(os.path.join(out_dir, "rer.csv"), result.rer_rows, prov)
    if result.discrete_rer:
        rows = [{"label": k, "rer_discrete_per_time": v.mean, "stderr": v.stderr, "n_samples": v.n_samples}
                for k, v in result.discrete_rer.items()]
        write_rows(os.path.join(out_dir, "rer_discrete.csv"), rows, prov)
    if result.fim is not None:
        write_fim_csv(os.path.join(out_dir, "fim.csv"), result.fim, prov)
        write_fim_csv(os.path.join(out_dir, "fim_log.csv"), result.fim, prov, log_scale=True)
        write_fim_eig_csv(os.path.join(out_dir, "fim_eig.csv"), result.fim, prov)
        asym = asymmetry_rows(result, theta)
        if asym:
            write_rows(os.path.join(out_dir, "asymmetry.csv"), asym, prov)
    if result.rdf is not None:
        write_rdf_csv(os.path.join(out_dir, "rdf.csv"), result.rdf, prov)
    if result.msd is not None:
        write_msd_csv(os.path.join(out_dir, "msd.csv"), result.msd, prov)
    if result.pressure is not None:
        write_pressure_csv(os.path.join(out_dir, "pressure.csv"), result.pressure, prov)
    counters = [{"counter": k, "value": v} for k, v in result.counters.items() if k != "wall_time"]
    write_rows(os.path.join(out_dir, "counters.csv"), counters, prov)


def _replica_worker(args):
    data, seed, kwargs = args
    from .config import load_config

    cfg = load_config({**data, "dynamics": {**data["dynamics"], "seed": seed}})
    return run_experiment(cfg, **kwargs)


def run_replicas(cfg: ExperimentConfig, n_replicas: int, threads: int = 1, **kwargs) -> list[SweepResult]:
    """Independent replicas with seeds seed, seed+1, ...; results returned in seed order."""
    jobs = [(cfg.data, cfg.seed + i, kwargs) for i in range(n_replicas)]
    if threads <= 1 or n_replicas == 1:
        return [_replica_worker(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_replica_worker, jobs))


def combine_rer(results: list[SweepResult], label: str, normalize: float = 1.0):
    return combine_replicas([r.rer[label].mean / normalize for r in results],
                            [r.rer[label].stderr / normalize for r in results])
