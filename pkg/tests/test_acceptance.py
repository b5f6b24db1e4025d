"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

The LJ and methane criteria read the cached campaign in ``campaign.py``; a cold
cache runs the trajectories first (several hours on one core). The lines are
collected in ``VERDICTS`` and echoed in the terminal summary.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import campaign
from pathsens.harness.oracle import OU_GRID, inverse_temperature_oracle, ou_discrete_gap, ou_oracle
from pathsens.observables import rdf_l2_diff
from pathsens.sensitivity import combine_replicas, fim_eigen, fim_quadratic_rer

VERDICTS = []
N_LJ = 2048


def verdict(number, title, ok, detail):
    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def _lj_refs():
    return [campaign.get(f"lj-ref-{s}") for s in campaign.LJ_SEEDS]


def _by_label(res, label, n=N_LJ):
    est = res.rer[label]
    return est.mean / n, est.stderr / n


def _combined(results, label, n=N_LJ):
    vals = [_by_label(r, label, n) for r in results]
    return combine_replicas([v for v, _ in vals], [s for _, s in vals])


# ---- 1, 2: analytic oracles ------------------------------------------------------

def test_criterion_01_ou_oracle():
    ou_oracle(1.0, 1.0, 0.1, n_steps=100)  # compile the kernels outside the timed region
    t0 = time.perf_counter()
    checks = []
    for i, (k, g, d) in enumerate(OU_GRID):
        checks += ou_oracle(k, g, d, seed=i)
    elapsed = time.perf_counter() - t0
    worst = max(abs(c.measured - c.expected) / c.stderr for c in checks)
    ok = all(c.passed for c in checks) and elapsed < 10.0
    verdict(1, "OU RER and FIM within 3 SE, runtime < 10 s", ok,
            f"{sum(c.passed for c in checks)}/{len(checks)} within 3 SE (worst {worst:.2f} SE), {elapsed:.1f} s")


def test_criterion_02_inverse_temperature():
    rer, fim = inverse_temperature_oracle(seed=0, rel_tol=0.01)
    verdict(2, "inverse-temperature RER and log-beta FIM within 1%", rer.passed and fim.passed,
            f"RER {rer.measured:.5g} vs {rer.expected:.5g}, FIM {fim.measured:.5g} vs {fim.expected:.5g}")


# ---- 3, 4, 5: LJ fluid, 2048 atoms -------------------------------------------------

def test_criterion_03_lj_rer_table():
    refs = _lj_refs()
    eps = _combined(refs, "epsilon:+5%")
    sp = _combined(refs, "sigma:+5%")
    sm = _combined(refs, "sigma:-5%")
    wall = max(r.counters["wall_time"] for r in refs)
    ok = (0.6 <= eps.mean <= 1.0 and 300 <= sp.mean <= 520 and 85 <= sm.mean <= 150
          and sp.mean / eps.mean > 100 and wall < 3600)
    verdict(3, "LJ RER/particle ranges, sigma/epsilon ratio, runtime", ok,
            f"eps+ {eps.mean:.3f}+/-{eps.stderr:.3f}, sig+ {sp.mean:.1f}+/-{sp.stderr:.1f}, "
            f"sig- {sm.mean:.1f}+/-{sm.stderr:.1f}, ratio {sp.mean / eps.mean:.0f}, run {wall / 60:.0f} min")


def test_criterion_04_asymmetry():
    refs = _lj_refs()
    out = {}
    for tag, label in (("sig+", "sigma:+5%"), ("sig-", "sigma:-5%"), ("eps+", "epsilon:+5%"),
                       ("eps-", "epsilon:-5%")):
        out[tag] = _combined(refs, label)
    quads = {}
    for name in ("sigma", "epsilon"):
        alt = next(a for a in refs[0].alternatives if a.parameter == name and a.epsilon > 0)
        quads[name] = combine_replicas([fim_quadratic_rer(r.fim.fim, alt.eps0) / N_LJ for r in refs])
    q_sig, q_eps = quads["sigma"], quads["epsilon"]
    ordered = out["sig+"].mean > q_sig.mean > out["sig-"].mean
    eps_ok = True
    for tag in ("eps+", "eps-"):
        se = np.hypot(out[tag].stderr, q_eps.stderr)
        eps_ok &= abs(out[tag].mean - q_eps.mean) <= 2 * se + 1e-12 * q_eps.mean
    verdict(4, "RER(+sigma) > FIM quadratic > RER(-sigma); epsilon both signs at the quadratic",
            ordered and eps_ok,
            f"sigma {out['sig+'].mean:.1f} > {q_sig.mean:.1f} > {out['sig-'].mean:.1f}; "
            f"epsilon {out['eps+'].mean:.4f} / {out['eps-'].mean:.4f} vs quadratic {q_eps.mean:.4f}")


def test_criterion_05_cutoff():
    refs = _lj_refs()
    short = _combined(refs, "rcut:1.6")
    long_ = _combined(refs, "rcut:7")
    ok = 0.5 <= short.mean <= 1.0 and long_.mean < 1e-3
    verdict(5, "cutoff RER/particle 1.6 in [0.5, 1.0], 7.0 below 1e-3", ok,
            f"1.6: {short.mean:.3f}+/-{short.stderr:.3f}, 7.0: {long_.mean:.2e}+/-{long_.stderr:.1e}")


# ---- 6: observables ------------------------------------------------------------------

def test_criterion_06_observables():
    ref = campaign.get("lj-ref-0")
    pert = {tag: campaign.get(f"lj-obs-{tag}") for tag in ("eps+", "eps-", "sig+", "sig-")}
    l2 = {tag: rdf_l2_diff(ref.rdf, r.rdf)[0] for tag, r in pert.items()}
    sep = min(l2["sig+"], l2["sig-"]) / max(l2["eps+"], l2["eps-"])
    dp = pert["sig+"].observables["pressure_mean"] - ref.observables["pressure_mean"]
    d_ratio = pert["sig+"].observables["diffusion"] / ref.observables["diffusion"]
    ok = sep >= 5 and dp > 1.0 and d_ratio < 0.75
    verdict(6, "RDF L2 sigma >= 5x epsilon, dP(+sigma) > 1, D(+sigma)/D < 0.75", ok,
            "L2 " + ", ".join(f"{k} {v:.3f}" for k, v in l2.items())
            + f" (x{sep:.1f}); P ref {ref.observables['pressure_mean']:.2f}, dP {dp:.2f}; D ratio {d_ratio:.2f}")


# ---- 7: discrete against continuous -----------------------------------------------

def test_criterion_07_discrete_gap():
    ou = [ou_discrete_gap(dt, n_atoms=2000, t_total=2000.0, seed=0) for dt in (0.2, 0.1)]
    ou_ratio = ou[0][0] / ou[1][0]
    exact_ratio = ou[0][2] / ou[1][2]
    runs = {dt: campaign.get(f"lj-desk-dt{dt:g}") for dt in campaign.DESK_DT}
    dt0, dt1, fine = campaign.DESK_DT
    label = "sigma:+5%"
    cont = runs[fine].rer[label].mean
    gaps = [abs(runs[dt].discrete_rer[label].mean - cont) for dt in (dt0, dt1)]
    ses = [np.hypot(runs[dt].discrete_rer[label].stderr, runs[fine].rer[label].stderr) for dt in (dt0, dt1)]
    lj_ratio = gaps[0] / gaps[1] if gaps[1] > 0 else np.inf
    ok = abs(ou_ratio - 2) <= 0.5 and abs(lj_ratio - 2) <= 0.5
    verdict(7, "gap ratio between dt and dt/2 is 2 +/- 0.5 (OU, desk LJ)", ok,
            f"OU {ou_ratio:.2f} (exact chain {exact_ratio:.2f}); LJ {lj_ratio:.2f} "
            f"from gaps {gaps[0]:.3g}+/-{ses[0]:.2g}, {gaps[1]:.3g}+/-{ses[1]:.2g}")


# ---- 8: non-equilibrium drive ---------------------------------------------------------

def test_criterion_08_nonequilibrium():
    refs = _lj_refs()
    eq_fim = np.mean([r.fim.fim for r in refs], axis=0)
    eq_w, _ = fim_eigen(eq_fim)
    nr = campaign.get("lj-nr-ref")
    w, v = nr.fim.eigenvalues, nr.fim.eigenvectors
    rel = np.abs(w / eq_w - 1)
    vec = np.abs(v[:, 0])  # (epsilon, sigma) components of the dominant direction
    vec_ok = np.all(np.abs(vec - [0.062, 0.998]) <= 0.01)
    l2_eps = rdf_l2_diff(nr.rdf, campaign.get("lj-nr-eps+").rdf)[0]
    l2_sig = rdf_l2_diff(nr.rdf, campaign.get("lj-nr-sig+").rdf)[0]
    l2_ok = abs(l2_eps / 0.058 - 1) <= 0.3 and abs(l2_sig / 0.473 - 1) <= 0.3
    ok = np.all(rel <= 0.15) and vec_ok and l2_ok
    verdict(8, "alpha=1 FIM spectrum within 15%, eigenvector within 0.01, RDF L2 within 30%", ok,
            f"eigenvalue shifts {rel[0]:.1%}, {rel[1]:.1%}; eigenvector ({vec[0]:.4f}, {vec[1]:.4f}); "
            f"L2 eps {l2_eps:.3f} (0.058), sig {l2_sig:.3f} (0.473)")


# ---- 9: methane ranking ---------------------------------------------------------------

def _methane_ranking(res):
    score = {}
    for row in res.rer_rows:
        score.setdefault(row["parameter"], []).append(row["rer_normalized"])
    score = {k: float(np.mean(v)) for k, v in score.items()}
    return sorted(score, key=score.get, reverse=True), score


def test_criterion_09_methane_ranking():
    ranks, details = [], []
    for s in campaign.METHANE_SEEDS:
        order, score = _methane_ranking(campaign.get(f"methane-{s}"))
        pairs_ok = all(score[f"sigma_{c}"] > score[f"epsilon_{c}"] for c in ("CC", "CH", "HH"))
        ranks.append((order[0] == "r_0" and order[1] == "theta_0" and pairs_ok, tuple(order[:3])))
        details.append(f"seed {s}: " + " > ".join(order[:4]) + f", sigma>epsilon {pairs_ok}")
    stable = len({top for _, top in ranks}) == 1
    verdict(9, "methane ranking r_0, theta_0 first; sigma above epsilon; stable over 3 seeds",
            all(ok for ok, _ in ranks) and stable, "; ".join(details))


# ---- 10: property suites ----------------------------------------------------------------

PROPERTY_TESTS = [
    "test_forcefield.py::test_lj_forces_match_finite_differences",
    "test_forcefield.py::test_methane_forces_match_finite_differences",
    "test_forcefield.py::test_jacobian_matches_finite_differences",
    "test_dynamics.py::test_momentum_conserved_without_thermostat",
    "test_sensitivity.py::test_rer_is_non_negative",
    "test_sensitivity.py::test_fim_sample_is_psd",
    "test_sensitivity.py::test_pinsker_bound_on_toy_chain",
    "test_dynamics.py::test_same_seed_same_trajectory",
    "test_harness.py::test_cli_sensitivity_and_determinism",
]


def test_criterion_10_property_suites():
    here = Path(__file__).parent
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *[str(here / t) for t in PROPERTY_TESTS]],
                          cwd=here, capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    verdict(10, "finite differences, momentum, RER >= 0, FIM PSD, Pinsker, determinism",
            proc.returncode == 0, tail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
