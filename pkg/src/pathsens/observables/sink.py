"""Trajectory sink that gathers RDF, MSD frames and pressure samples."""

from __future__ import annotations

import csv

import numpy as np

from ..dynamics.run import Sink
from .msd import MsdSeries, diffusion_coefficient, msd_compute
from .pressure import PressureSeries, pressure_sample
from .rdf import RdfHistogram, RdfTable, molecular_centres, rdf_accumulate, rdf_finalize


class ObservableSink(Sink):
    """Samples observables along a production run.

    Strides are in production steps; a stride of 0 disables that observable.
    ``pressure_scale`` converts model pressure units on output (e.g. to atm).
    """

    def __init__(self, topo, beta, dt, rdf_bin: float, rdf_r_max: float, mode: str = "atomic",
                 rdf_stride: int = 100, msd_stride: int = 100, pressure_stride: int = 10,
                 pressure_scale: float = 1.0):
        self.topo = topo
        self.beta = beta
        self.dt = dt
        self.mode = mode
        self.rdf = RdfHistogram(rdf_bin, rdf_r_max, mode) if rdf_stride else None
        self.rdf_stride = rdf_stride
        self.msd_stride = msd_stride
        self.pressure_stride = pressure_stride
        self.pressure_scale = pressure_scale
        self._frames = []
        self._p_steps = []
        self._p = []

    def observe(self, step, state):
        if self.rdf is not None and step % self.rdf_stride == 0:
            rdf_accumulate(self.rdf, state, self.topo)
        if self.msd_stride and step % self.msd_stride == 0:
            if self.mode == "molecular":
                self._frames.append(self._unwrapped_centres(state))
            else:
                self._frames.append(state.unwrapped().copy())
        if self.pressure_stride and step % self.pressure_stride == 0:
            p = pressure_sample(state, state.evaluation.virial, self.beta)
            self._p_steps.append(step)
            self._p.append(p * self.pressure_scale)

    def _unwrapped_centres(self, state):
        q = state.unwrapped()
        m = self.topo.masses
        mol = self.topo.molecule
        n = self.topo.n_molecules
        tot = np.bincount(mol, weights=m, minlength=n)
        return np.stack([np.bincount(mol, weights=m * q[:, k], minlength=n) for k in range(3)], 1) / tot[:, None]

    def rdf_table(self) -> RdfTable:
        return rdf_finalize(self.rdf)

    def msd(self, origin_stride: int = 10, max_lag: int | None = None) -> MsdSeries:
        return msd_compute(np.array(self._frames), self.dt * self.msd_stride, origin_stride, max_lag,
                           mode=self.mode)

    def diffusion(self, origin_stride: int = 10, window=(0.5, 1.0), max_lag: int | None = None) -> float:
        return diffusion_coefficient(self.msd(origin_stride, max_lag), 3, window)

    def pressure(self) -> PressureSeries:
        return PressureSeries(np.array(self._p_steps), np.array(self._p))

    def summary(self) -> dict:
        out = {}
        if self._p:
            ps = self.pressure()
            out["pressure_mean"], out["pressure_std"] = ps.mean, ps.std
        if len(self._frames) >= 8:
            out["diffusion"] = self.diffusion()
        return out


def _header(fh, provenance):
    for key, value in (provenance or {}).items():
        fh.write(f"# {key}: {value}\n")


def write_rdf_csv(path, table: RdfTable, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r_center", "g_r"])
        for r, g in zip(table.r, table.g):
            w.writerow([f"{r:.10g}", f"{g:.10g}"])


def write_msd_csv(path, series: MsdSeries, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lag", "msd"])
        for t, m in zip(series.lag_times, series.msd_values):
            w.writerow([f"{t:.10g}", f"{m:.10g}"])


def write_pressure_csv(path, series: PressureSeries, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "P"])
        for s, p in zip(series.steps, series.samples):
            w.writerow([int(s), f"{p:.10g}"])
        fh.write(f"# mean: {series.mean:.10g}\n# std: {series.std:.10g}\n")


def write_compare_csv(path, metrics: dict, provenance=None):
    with open(path, "w", newline="") as fh:
        _header(fh, provenance)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        for k, v in metrics.items():
            w.writerow([k, f"{v:.10g}" if isinstance(v, float) else v])


def read_rdf_csv(path) -> RdfTable:
    with open(path) as fh:
        rows = [ln.strip().split(",") for ln in fh if not ln.startswith("#")][1:]
    r = np.array([float(a) for a, _ in rows])
    g = np.array([float(b) for _, b in rows])
    width = float(r[1] - r[0]) if len(r) > 1 else 0.0
    return RdfTable(r, g, width)


__all__ = ["ObservableSink", "molecular_centres", "read_rdf_csv", "write_compare_csv", "write_msd_csv",
           "write_pressure_csv", "write_rdf_csv"]
