"""Long simulation campaign behind the acceptance suite.

Each named run is cached as a pickle keyed by its config hash, so the
acceptance tests reuse results instead of repeating hour-long trajectories.
Run ``python tests/campaign.py [name ...]`` to fill the cache ahead of time.
"""

from __future__ import annotations

import hashlib
import json
import os
import pickle
import sys
import time

from pathsens.harness.config import load_preset
from pathsens.harness.experiment import run_experiment

CACHE = os.environ.get("PATHSENS_CACHE", os.path.join(os.path.dirname(__file__), "..", ".acceptance_cache"))

LJ_SEEDS = (0, 1, 2, 3)
NR_SEED = 100  # alpha = 1 runs use fresh noise so the comparison with alpha = 0 is not trivial
DESK_DT = (0.001, 0.0005, 0.00025)  # preset step, half of it, and a quarter as the continuous reference
METHANE_SEEDS = (0, 1, 2)


def _lj(over):
    return ("lj-paper", over)


def _obs_only(param, factor, seed=0, alpha=0.0):
    return _lj({"dynamics": {"seed": seed, "alpha": alpha}, "parameters": {param: factor}})


def _desk_dt(dt):
    # same physical time at every step size
    t_prod, t_equil = 40.0, 5.0
    return ("lj-desk", {"dynamics": {"dt": dt, "n_steps": int(round(t_prod / dt)),
                                     "n_equil": int(round(t_equil / dt))},
                        "perturbations": [{"parameter": "epsilon", "magnitude": 0.05, "signs": ["+"]},
                                          {"parameter": "sigma", "magnitude": 0.05, "signs": ["+"]}],
                        "sensitivity": {"discrete": True, "fim": False, "stride": 5}})


def _methane(seed):
    # molecules start as rigid tetrahedra; intramolecular modes need several 1/gamma to heat up
    return ("methane-paper", {"dynamics": {"seed": seed, "n_steps": 6000, "n_equil": 10000},
                              "sensitivity": {"fim": False, "stride": 10}})


# name -> (preset, overrides, run_experiment keyword arguments)
RUNS = {}
for s in LJ_SEEDS:
    RUNS[f"lj-ref-{s}"] = (*_lj({"dynamics": {"seed": s}}), {"rcut_list": [1.6, 7.0]})
for tag, param, factor in (("eps+", "epsilon", 1.05), ("eps-", "epsilon", 0.95),
                           ("sig+", "sigma", 1.05), ("sig-", "sigma", 0.95)):
    RUNS[f"lj-obs-{tag}"] = (*_obs_only(param, factor), {"sensitivity": False})
RUNS["lj-nr-ref"] = (*_lj({"dynamics": {"seed": NR_SEED, "alpha": 1.0}}), {"rcut_list": []})
RUNS["lj-nr-eps+"] = (*_obs_only("epsilon", 1.05, NR_SEED, 1.0), {"sensitivity": False})
RUNS["lj-nr-sig+"] = (*_obs_only("sigma", 1.05, NR_SEED, 1.0), {"sensitivity": False})
for dt in DESK_DT:
    RUNS[f"lj-desk-dt{dt:g}"] = (*_desk_dt(dt), {"rcut_list": [], "observables": False})
for s in METHANE_SEEDS:
    RUNS[f"methane-{s}"] = (*_methane(s), {"rcut_list": [], "observables": False})


def config_for(name):
    preset, over, _ = RUNS[name]
    return load_preset(preset, over)


def _path(name):
    cfg = config_for(name)
    kw = RUNS[name][2]
    full = json.dumps(cfg.data, sort_keys=True, separators=(",", ":"))
    key = hashlib.sha256((full + json.dumps(kw, sort_keys=True)).encode()).hexdigest()[:12]
    return os.path.join(CACHE, f"{name}-{key}.pkl")


def cached(name):
    return os.path.exists(_path(name))


def get(name):
    """Load a campaign result, running it first if it is not cached."""
    path = _path(name)
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return pickle.load(fh)
    res = run_experiment(config_for(name), **RUNS[name][2])
    os.makedirs(CACHE, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        pickle.dump(res, fh)
    os.replace(tmp, path)
    return res


def main(names):
    for name in names or list(RUNS):
        if cached(name):
            print(f"{name}: cached", flush=True)
            continue
        t0 = time.time()
        get(name)
        print(f"{name}: done in {time.time() - t0:.0f} s", flush=True)


if __name__ == "__main__":
    main(sys.argv[1:])
