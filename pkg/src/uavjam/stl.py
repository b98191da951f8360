"""Seasonal-trend decomposition by Loess, built on the local smoother.

The inner loop follows the classic formulation: detrend, smooth each cycle
subseries (with one extrapolated position on each side), remove the low-pass
filtered remainder of that smooth, then re-estimate the trend from the
deseasonalized series.  Optional outer iterations derive bisquare robustness
weights from the fit residual and repeat the inner loop with them.

Defaults target power spectra chopped into blocks: ``period`` equals the
block length, the seasonal smoother spans every cycle subseries point (a
periodic seasonal), the trend smoother spans 1.5 periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .loess import LoessParams, loess_smooth

_SPREAD_TOL = 1e-12


@dataclass(frozen=True)
class StlParams:
    period: int = 1024
    seasonal_span: int | None = None  # default: cover all cycle-subseries points
    trend_span: int | None = None     # default: smallest odd >= 1.5 * period
    lowpass_span: int | None = None   # default: smallest odd >= period
    seasonal_degree: int = 0
    trend_degree: int = 1
    lowpass_degree: int = 1
    inner_iterations: int = 2
    outer_iterations: int = 0


@dataclass
class StlDecomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray


def _smallest_odd_at_least(x: float) -> int:
    k = int(math.ceil(x))
    return k if k % 2 == 1 else k + 1


def _resolve_spans(n: int, params: StlParams) -> tuple[int, int, int]:
    seasonal = params.seasonal_span if params.seasonal_span is not None else 10 * n + 1
    trend = (params.trend_span if params.trend_span is not None
             else _smallest_odd_at_least(1.5 * params.period))
    lowpass = (params.lowpass_span if params.lowpass_span is not None
               else _smallest_odd_at_least(params.period))
    for name, span in (("seasonal_span", seasonal), ("trend_span", trend),
                       ("lowpass_span", lowpass)):
        if span < 3 or span % 2 == 0:
            raise ConfigError(f"{name} must be odd and >= 3, got {span}")
    return seasonal, trend, lowpass


def _validate(series: np.ndarray, params: StlParams) -> np.ndarray:
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise DomainError("series must be 1-D")
    if not np.all(np.isfinite(y)):
        raise DomainError("series contains non-finite values")
    if params.period < 2:
        raise ConfigError(f"period must be >= 2, got {params.period}")
    if y.size < 2 * params.period:
        raise ConfigError(
            f"series length {y.size} shorter than two periods of {params.period}")
    for name, deg in (("seasonal_degree", params.seasonal_degree),
                      ("trend_degree", params.trend_degree),
                      ("lowpass_degree", params.lowpass_degree)):
        if deg not in (0, 1):
            raise ConfigError(f"{name} must be 0 or 1, got {deg}")
    if params.inner_iterations < 1:
        raise ConfigError("inner_iterations must be >= 1")
    if params.outer_iterations < 0:
        raise ConfigError("outer_iterations must be >= 0")
    return y


def _moving_average(x: np.ndarray, k: int) -> np.ndarray:
    c = np.empty(x.size + 1)
    c[0] = 0.0
    np.cumsum(x, out=c[1:])
    return (c[k:] - c[:-k]) / k


def _subseries_eval_weights(m: int, span: int, degree: int):
    """Tricube weights and offsets for smoothing one cycle subseries.

    Data sits at positions 0..m-1; evaluation runs at -1..m so each subseries
    extends one period before and after the series.  Returns (tri, u, h):
    tri (m+2, m) raw tricube weights, u (m+2, m) offsets, h (m+2,) bandwidths.
    """
    pos = np.arange(m, dtype=float)
    evals = np.arange(-1, m + 1, dtype=float)
    if span >= m:
        lo = np.zeros(m + 2, dtype=int)
        hi = np.full(m + 2, m - 1)
        h = np.maximum(evals - lo, hi - evals)
        if span > m:
            h = h + (span - m) // 2  # integer half-width, classic convention
    else:
        centered = np.clip(np.round(evals).astype(int) - (span - 1) // 2, 0, m - span)
        lo, hi = centered, centered + span - 1
        h = np.maximum(evals - lo, hi - evals)
    u = pos[None, :] - evals[:, None]
    h_safe = np.where(h > 0, h, 1.0)
    tri = np.clip(1.0 - (np.abs(u) / h_safe[:, None]) ** 3, 0.0, None) ** 3
    tri[(pos[None, :] < lo[:, None]) | (pos[None, :] > hi[:, None])] = 0.0
    return tri, u, h


def _smooth_group(sub: np.ndarray, span: int, degree: int,
                  rw: np.ndarray | None) -> np.ndarray:
    """Smooth a batch of equal-length cycle subseries.

    sub: (phases, m) values.  Returns (phases, m+2) values evaluated at
    positions -1..m.
    """
    phases, m = sub.shape
    tri, u, h = _subseries_eval_weights(m, span, degree)
    if rw is None:
        w = np.broadcast_to(tri, (phases, m + 2, m))
    else:
        w = tri[None, :, :] * rw[:, None, :]
    s0 = w.sum(axis=2)
    ok = s0 > 0
    wn = w / np.where(ok, s0, 1.0)[:, :, None]
    mean = np.einsum("pem,pm->pe", wn, sub)
    if degree == 0:
        out = mean
    else:
        a = np.einsum("pem,em->pe", wn, u) if rw is not None else (wn * u).sum(axis=2)
        d = u[None, :, :] - a[:, :, None]
        c = (wn * d * d).sum(axis=2)
        usable = c > _SPREAD_TOL * np.maximum(h, 1.0)[None, :] ** 2
        slope = (wn * d * sub[:, None, :]).sum(axis=2) / np.where(usable, c, 1.0)
        out = np.where(usable, mean - a * slope, mean)
    fallback = np.concatenate(
        [sub[:, :1], sub, sub[:, -1:]], axis=1)
    return np.where(ok, out, fallback)


def _cycle_subseries_smooth(detrended: np.ndarray, period: int, span: int,
                            degree: int, rw: np.ndarray | None) -> np.ndarray:
    """Smooth every cycle subseries and reassemble, extended one period on
    each side: output length is n + 2 * period."""
    n = detrended.size
    ext = np.empty(n + 2 * period)
    lengths = np.array([(n - j + period - 1) // period for j in range(period)])
    for m in np.unique(lengths):
        phases = np.nonzero(lengths == m)[0]
        sub = np.stack([detrended[j::period] for j in phases])
        rw_sub = np.stack([rw[j::period] for j in phases]) if rw is not None else None
        smoothed = _smooth_group(sub, span, degree, rw_sub)
        idx = phases[:, None] + np.arange(m + 2)[None, :] * period
        ext[idx] = smoothed
    return ext


def _robustness_weights(residual: np.ndarray) -> np.ndarray:
    scale = 6.0 * np.median(np.abs(residual))
    if scale <= 0:
        return np.ones_like(residual)
    r = np.abs(residual) / scale
    w = np.where(r < 1.0, (1.0 - r**2) ** 2, 0.0)
    w[r <= 0.001] = 1.0
    w[r >= 0.999] = 0.0
    return w


def stl_decompose(series: np.ndarray, params: StlParams) -> StlDecomposition:
    """Decompose a series into trend + seasonal + residual.

    The residual is formed by subtraction, so the three components add back
    to the input at float precision.
    """
    y = _validate(series, params)
    seasonal_span, trend_span, lowpass_span = _resolve_spans(y.size, params)
    n, p = y.size, params.period
    trend = np.zeros(n)
    seasonal = np.zeros(n)
    rw = None
    for outer in range(params.outer_iterations + 1):
        if outer > 0:
            rw = _robustness_weights(y - trend - seasonal)
        for _ in range(params.inner_iterations):
            detrended = y - trend
            ext = _cycle_subseries_smooth(detrended, p, seasonal_span,
                                          params.seasonal_degree, rw)
            low = _moving_average(_moving_average(_moving_average(ext, p), p), 3)
            low = loess_smooth(low, LoessParams(span=lowpass_span,
                                                degree=params.lowpass_degree))
            seasonal = ext[p : p + n] - low
            trend = loess_smooth(y - seasonal,
                                 LoessParams(span=trend_span,
                                             degree=params.trend_degree,
                                             robustness_weights=rw))
    residual = y - trend - seasonal
    return StlDecomposition(trend=trend, seasonal=seasonal, residual=residual)


def reconstruct(decomposition: StlDecomposition) -> np.ndarray:
    """Structured part of the fit: trend plus seasonal, residual excluded."""
    return decomposition.trend + decomposition.seasonal


def reconstruction_rmse(reconstructed: np.ndarray, original: np.ndarray) -> float:
    a = np.asarray(reconstructed, dtype=float)
    b = np.asarray(original, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DomainError("empty input")
    err = a - b
    return float(np.sqrt(np.mean(err * err)))
