"""Normalisation conventions and CSV emission for sensitivity results."""

from __future__ import annotations

import csv

import numpy as np

from ..errors import ConfigurationError
from .analysis import FimReport

NORMALIZATIONS = ("none", "particle", "molecule", "interaction", "pair-ratio")
# uneven pair-class populations in CH4: CH pairs ~ 8x and HH ~ 16x the CC pairs
PAIR_RATIO = {"CC": 1.0, "CH": 8.0, "HH": 16.0}


def _pair_class_of(topo, name):
    for c, pc in enumerate(topo.pair_classes):
        if name in (pc.epsilon_name, pc.sigma_name):
            return c, pc
    return None, None


def normalizer(topo, parameter: str, mode: str) -> float:
    """Divisor applied to a raw RER for ``parameter`` under a reporting mode.

    ``interaction`` divides by the number of terms the parameter enters (bonds,
    angles or intermolecular pairs of its class). ``pair-ratio`` divides by the
    molecule count and additionally by 8 (C-H) or 16 (H-H) for pair classes.
    """
    if mode not in NORMALIZATIONS:
        raise ConfigurationError(f"unknown normalization {mode!r}; choose from {NORMALIZATIONS}",
                                 "outputs.normalization")
    if mode == "none":
        return 1.0
    if mode == "particle":
        return float(topo.n_atoms)
    if mode == "molecule":
        return float(topo.n_molecules)
    c, pc = _pair_class_of(topo, parameter)
    if mode == "interaction":
        if parameter in ("K_b", "r_0"):
            return float(max(len(topo.bonds), 1))
        if parameter in ("K_theta", "theta_0"):
            return float(max(len(topo.angles), 1))
        if c is not None:
            return float(max(topo.pair_class_counts()[c], 1))
        return float(topo.n_atoms)
    base = float(topo.n_molecules)
    if c is not None:
        base *= PAIR_RATIO.get(pc.label, 1.0)
    return base


def _header(fh, provenance):
    for key, value in (provenance or {}).items():
        fh.write(f"# {key}: {value}\n")


def rer_rows(estimates: dict, alternatives, topo, normalization: str = "particle"):
    """Rows for rer.csv from label -> Estimate."""
    rows = []
    for a in alternatives:
        est = estimates[a.label]
        div = normalizer(topo, a.parameter, normalization)
        rows.append({
            "parameter": a.parameter,
            "direction": a.sign,
            "epsilon": a.epsilon,
            "rer": est.mean,
            "rer_normalized": est.mean / div,
            "stderr": est.stderr,
            "stderr_normalized": est.stderr / div,
            "n_samples": est.n_samples,
            "normalization": normalization,
        })
    return rows


def write_rows(path, rows, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in r.items()})


def write_fim_csv(path, report: FimReport, provenance=None, log_scale: bool = False):
    mat = report.log_fim if log_scale else report.fim
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(report.names)
        for row in mat:
            w.writerow([f"{x:.10g}" for x in row])


def write_fim_eig_csv(path, report: FimReport, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eigenvalue"] + list(report.names))
        for k, lam in enumerate(report.eigenvalues):
            w.writerow([f"{lam:.10g}"] + [f"{x:.10g}" for x in report.eigenvectors[:, k]])


def read_csv_rows(path):
    """Read a CSV written here, skipping provenance comment lines."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_matrix_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    return names, np.array([[float(x) for x in ln.strip().split(",")] for ln in lines[1:]])
