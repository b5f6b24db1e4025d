"""Mean square displacement with multiple time origins, and the Einstein diffusion fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EstimationError


@dataclass
class MsdSeries:
    lag_times: np.ndarray
    msd_values: np.ndarray
    n_origins: np.ndarray
    mode: str = "atomic"


def msd_compute(frames, frame_dt: float, origin_stride: int = 10, max_lag: int | None = None,
                mode: str = "atomic") -> MsdSeries:
    """Multi-origin MSD from unwrapped coordinates.

    ``frames`` has shape (F, N, d). Origins are taken every ``origin_stride``
    frames; each lag averages over all origins that fit and over particles.
    """
    x = np.asarray(frames, dtype=float)
    n_frames = x.shape[0]
    if n_frames < 2:
        raise EstimationError("need at least two frames for an MSD")
    max_lag = n_frames - 1 if max_lag is None else min(max_lag, n_frames - 1)
    origins = np.arange(0, n_frames - 1, max(int(origin_stride), 1))
    msd = np.zeros(max_lag + 1)
    counts = np.zeros(max_lag + 1, dtype=np.int64)
    for t0 in origins:
        top = min(max_lag, n_frames - 1 - t0)
        d = x[t0: t0 + top + 1] - x[t0]
        msd[: top + 1] += np.einsum("tnk,tnk->t", d, d) / x.shape[1]
        counts[: top + 1] += 1
    keep = counts > 0
    return MsdSeries(np.arange(max_lag + 1)[keep] * frame_dt, msd[keep] / counts[keep],
                     counts[keep], mode)


def diffusion_coefficient(series: MsdSeries, dim: int = 3, window=(0.5, 1.0)) -> float:
    """D = slope / (2 d) from a least-squares line over a fraction of the lags.

    ``window`` gives the (start, stop) fractions of the lag range; the default
    uses the latter half.
    """
    t, y = series.lag_times, series.msd_values
    n = len(t)
    lo, hi = int(window[0] * (n - 1)), int(np.ceil(window[1] * (n - 1))) + 1
    tw, yw = t[lo:hi], y[lo:hi]
    if len(tw) < 3:
        raise EstimationError(f"only {len(tw)} lags in the fit window")
    slope = np.polyfit(tw, yw, 1)[0]
    return float(slope / (2.0 * dim))
