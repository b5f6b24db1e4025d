"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 oracle failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..errors import ConfigurationError, DivergenceError, InvalidGeometryError
from .config import PRESETS, deep_merge, load_config, preset_data, read_yaml

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_ORACLE = 0, 2, 3, 4


def _preset_name(preset, model):
    if preset is None:
        return None
    if preset in PRESETS:
        return preset
    if preset == "paper" and model in ("lj-fluid", "methane"):
        return {"lj-fluid": "lj-paper", "methane": "methane-paper"}[model]
    if preset == "desk" and model in (None, "lj-fluid"):
        return "lj-desk"
    if preset == "paper" and model is None:
        raise ConfigurationError("--preset paper needs --model lj-fluid or methane", "--preset")
    raise ConfigurationError(f"unknown preset {preset!r}; choose from {PRESETS} or 'paper'", "--preset")


def resolve_config(args):
    """Merge preset, config file and command-line overrides, then validate."""
    data = {}
    name = _preset_name(args.preset, args.model)
    if name:
        data = preset_data(name)
    if args.config:
        data = deep_merge(data, read_yaml(args.config))
    over = {}
    if args.model:
        over["model"] = args.model
    if args.seed is not None:
        over.setdefault("dynamics", {})["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        over.setdefault("dynamics", {})["n_steps"] = args.steps
    if getattr(args, "equil", None) is not None:
        over.setdefault("dynamics", {})["n_equil"] = args.equil
    if getattr(args, "replicas", None) is not None:
        over["replicas"] = args.replicas
    if getattr(args, "perturb", None):
        over["perturbations"] = list(args.perturb)
    if getattr(args, "fim", None) is not None:
        over.setdefault("sensitivity", {})["fim"] = args.fim
    if getattr(args, "discrete", False):
        over.setdefault("sensitivity", {})["discrete"] = True
    if getattr(args, "normalization", None):
        over.setdefault("sensitivity", {})["normalization"] = args.normalization
    if args.out:
        over.setdefault("outputs", {})["directory"] = args.out
    return load_config(deep_merge(data, over))


def _common(p):
    p.add_argument("--config", help="YAML experiment file")
    p.add_argument("--preset", help="lj-paper, methane-paper, lj-desk (or 'paper'/'desk' with --model)")
    p.add_argument("--model", choices=["lj-fluid", "methane", "ou-oracle", "free-particle"])
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int, help="override dynamics.n_steps")
    p.add_argument("--equil", type=int, help="override dynamics.n_equil")
    p.add_argument("--threads", type=int, default=1, help="worker processes for replicas")
    p.add_argument("--replicas", type=int, help="independent seeds seed, seed+1, ...")
    p.add_argument("--deterministic", action="store_true",
                   help="single-threaded kernels and ordered merging (byte-identical outputs)")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathsens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run dynamics and write observables")
    _common(p)

    p = sub.add_parser("sensitivity", help="RER/FIM for perturbation directions on one trajectory")
    _common(p)
    p.add_argument("--perturb", action="append", metavar="NAME:VALUE",
                   help="e.g. sigma:+5%%, epsilon:5%% (both signs), rcut:7")
    p.add_argument("--fim", dest="fim", action="store_true", default=None)
    p.add_argument("--no-fim", dest="fim", action="store_false")
    p.add_argument("--discrete", action="store_true", help="also accumulate BBK discrete-time estimators")
    p.add_argument("--normalization", choices=["none", "particle", "molecule", "interaction", "pair-ratio"])

    p = sub.add_parser("cutoff-study", help="RER of candidate cutoffs against the reference cutoff")
    _common(p)
    p.add_argument("--rcut", type=float, action="append", help="candidate cutoff (repeatable)")

    p = sub.add_parser("observables", help="RDF/MSD/pressure of reference and perturbed models")
    _common(p)
    p.add_argument("--perturb", action="append", metavar="NAME:VALUE",
                   help="run a perturbed model for comparison (repeatable)")

    p = sub.add_parser("oracle", help="analytic oracle checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _cmd_simulate(cfg, args):
    from .experiment import run_experiment

    out = cfg["outputs"]["directory"]
    res = run_experiment(cfg, sensitivity=False, out_dir=out)
    for k, v in res.observables.items():
        print(f"{k}: {v:.6g}")
    print(f"wrote {out}")


def _cmd_sensitivity(cfg, args):
    from ..sensitivity import check_fim_request
    from .experiment import asymmetry_rows, perturbation_list, run_experiment, run_replicas, write_outputs

    perts = perturbation_list(cfg)
    if not perts:
        raise ConfigurationError("at least one perturbation is required", "perturbations")
    if any(name == "rcut" for name, _ in perts):
        if args.fim:
            from ..sensitivity.directions import Alternative

            check_fim_request([Alternative("rcut", "rcut", 0.0, None, None)], True)
        # the FIM is undefined along r_cut; without an explicit --fim only RER is reported
        cfg = cfg.with_overrides({"sensitivity": {"fim": False}})
    out = cfg["outputs"]["directory"]
    n_rep = cfg["replicas"]
    if n_rep == 1:
        results = [run_experiment(cfg, observables=False, rcut_list=[], out_dir=out)]
    else:
        results = run_replicas(cfg, n_rep, args.threads, observables=False, rcut_list=[])
        for i, r in enumerate(results):
            write_outputs(r, os.path.join(out, f"replica_{i}"), None)
    for i, r in enumerate(results):
        for row in r.rer_rows:
            print(f"[seed {r.provenance['seed']}] {row['parameter']:>10} {row['direction']:>6} "
                  f"eps={row['epsilon']:<8g} RER={row['rer_normalized']:.6g} +/- {row['stderr_normalized']:.2g}"
                  f" ({row['normalization']})")
        for row in asymmetry_rows(r, None):
            print(f"[seed {r.provenance['seed']}] asymmetry {row['parameter']}: odd={row['odd']:.4g} "
                  f"+/- {row['odd_stderr']:.2g}, even residual={row['even_residual']:.4g}")
    print(f"wrote {out}")


def _cmd_cutoff(cfg, args):
    from ..sensitivity import write_rows
    from .experiment import run_experiment

    rcuts = args.rcut or cfg["sensitivity"]["rcut_list"]
    if not rcuts:
        raise ConfigurationError("give at least one --rcut", "sensitivity.rcut_list")
    out = cfg["outputs"]["directory"]
    res = run_experiment(cfg, observables=False, perturbations=[], rcut_list=rcuts, out_dir=out)
    n = cfg["system"]["n_atoms"] or cfg["system"]["n_molecules"]
    rows = []
    for a in res.alternatives:
        est = res.rer[a.label]
        rows.append({"r_cut": a.epsilon, "r_cut_ref": cfg["system"]["r_cut"], "rer": est.mean,
                     "rer_per_particle": est.mean / n, "stderr_per_particle": est.stderr / n,
                     "n_samples": est.n_samples})
        print(f"r_cut {a.epsilon:g}: RER/particle = {est.mean / n:.6g} +/- {est.stderr / n:.2g}")
    os.makedirs(out, exist_ok=True)
    write_rows(os.path.join(out, "rer_vs_rcut.csv"), rows, res.provenance)


def _cmd_observables(cfg, args):
    from ..observables import rdf_l2_diff, write_compare_csv
    from .experiment import perturbation_list, run_experiment

    out = cfg["outputs"]["directory"]
    ref = run_experiment(cfg, sensitivity=False, out_dir=os.path.join(out, "reference"))
    metrics = {f"reference.{k}": v for k, v in ref.observables.items()}
    for name, val in perturbation_list(cfg):
        if name == "rcut":
            over = {"system": {"r_cut": val}}
            tag = f"rcut_{val:g}"
        else:
            base = ref_theta(cfg)[name]
            over = {"parameters": {name: base * (1 + val)}}
            tag = f"{name}_{val:+g}"
        pert = run_experiment(cfg.with_overrides(over), sensitivity=False, out_dir=os.path.join(out, tag))
        l2, area = rdf_l2_diff(ref.rdf, pert.rdf)
        metrics[f"{tag}.rdf_l2"] = l2
        metrics[f"{tag}.rdf_rel_area"] = area
        for k, v in pert.observables.items():
            metrics[f"{tag}.{k}"] = v
    os.makedirs(out, exist_ok=True)
    write_compare_csv(os.path.join(out, "compare.csv"), metrics, cfg.provenance())
    for k, v in metrics.items():
        print(f"{k}: {v:.6g}")


def ref_theta(cfg):
    from .experiment import build_system

    small = cfg.with_overrides({"dynamics": {"n_steps": 0, "n_equil": 0}})
    return build_system(small).theta


def _cmd_oracle(args):
    from .oracle import run_oracles

    results = run_oracles(args.seed)
    for r in results:
        print(r.line())
    if args.out:
        from ..sensitivity import write_rows

        os.makedirs(args.out, exist_ok=True)
        write_rows(os.path.join(args.out, "oracle.csv"),
                   [{"check": r.name, "passed": r.passed, "measured": r.measured, "expected": r.expected,
                     "stderr": r.stderr} for r in results], {"seed": args.seed})
    return EXIT_OK if all(r.passed for r in results) else EXIT_ORACLE


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "deterministic", False) or getattr(args, "threads", 1) == 1:
        os.environ.setdefault("NUMBA_NUM_THREADS", "1")
    try:
        if args.command == "oracle":
            return _cmd_oracle(args)
        cfg = resolve_config(args)
        {"simulate": _cmd_simulate, "sensitivity": _cmd_sensitivity, "cutoff-study": _cmd_cutoff,
         "observables": _cmd_observables}[args.command](cfg, args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, InvalidGeometryError) as exc:
        # overlapping atoms mid-run are a blown-up trajectory, not bad input
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
