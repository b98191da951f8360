"""Locally weighted regression (Loess) on evenly spaced series.

Each output point is a tricube-weighted least-squares fit of degree 0 or 1
over the ``span`` nearest samples, evaluated at that point.  Windows slide
against the series edges rather than padding or reflecting; when ``span``
exceeds the series length the tricube bandwidth widens by half the excess,
following the classic STL smoother conventions, so results stay comparable
with reference implementations.

The smoother is a linear operator for fixed inputs, which lets the module
cache equivalent kernels per (length, span, degree) and evaluate interior
points with a single convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

# Degenerate-window guard: below this weighted spread (relative to the
# bandwidth) the degree-1 system is singular and the fit falls back to the
# weighted mean.
_SPREAD_TOL = 1e-12

_kernel_cache: dict = {}
_KERNEL_CACHE_MAX = 64


@dataclass(frozen=True)
class LoessParams:
    """Smoothing controls: odd window size, polynomial degree, optional
    per-point robustness weights multiplied into the tricube weights."""

    span: int
    degree: int = 1
    robustness_weights: np.ndarray | None = None


def _validate(series: np.ndarray, params: LoessParams) -> np.ndarray:
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DomainError("series must be a non-empty 1-D array")
    if not np.all(np.isfinite(y)):
        raise DomainError("series contains non-finite values")
    if params.degree not in (0, 1):
        raise ConfigError(f"degree must be 0 or 1, got {params.degree}")
    if params.span < params.degree + 1:
        raise ConfigError(f"span {params.span} too small for degree {params.degree}")
    if params.span % 2 == 0:
        raise ConfigError(f"span must be odd, got {params.span}")
    rw = params.robustness_weights
    if rw is not None:
        rw = np.asarray(rw, dtype=float)
        if rw.shape != y.shape:
            raise ConfigError("robustness_weights length must match series length")
        if not np.all(np.isfinite(rw)) or np.any(rw < 0):
            raise ConfigError("robustness_weights must be finite and non-negative")
    return y


def _tricube(r: np.ndarray) -> np.ndarray:
    r = np.minimum(np.abs(r), 1.0)
    return (1.0 - r**3) ** 3


def _rowwise_fit(u: np.ndarray, w: np.ndarray, y: np.ndarray, degree: int,
                 h: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Closed-form weighted fit per row, evaluated at offset 0.

    u, w, y: (rows, q) offsets, weights, values.  h: (rows,) bandwidths.
    fallback: value to emit where a window has zero total weight.
    """
    s0 = w.sum(axis=1)
    ok = s0 > 0
    s0_safe = np.where(ok, s0, 1.0)
    wn = w / s0_safe[:, None]
    mean = (wn * y).sum(axis=1)
    if degree == 0:
        out = mean
    else:
        a = (wn * u).sum(axis=1)
        d = u - a[:, None]
        c = (wn * d * d).sum(axis=1)
        usable = c > _SPREAD_TOL * np.maximum(h, 1.0) ** 2
        c_safe = np.where(usable, c, 1.0)
        slope = (wn * d * y).sum(axis=1) / c_safe
        out = np.where(usable, mean - a * slope, mean)
    return np.where(ok, out, fallback)


def _equivalent_kernel_rows(n: int, q: int, degree: int, rows: np.ndarray,
                            lo: np.ndarray) -> np.ndarray:
    """Kernel matrix K with out[rows[i]] = K[i] . y[lo[i]:lo[i]+width],
    width being the actual window size min(q, n)."""
    width = min(q, n)
    j = np.arange(width, dtype=float)
    u = lo[:, None] + j[None, :] - rows[:, None]
    h = np.maximum(rows - lo, lo + width - 1 - rows).astype(float)
    if q > n:
        h = h + (q - n) // 2  # integer half-width, matching the classic smoother
    h_safe = np.where(h > 0, h, 1.0)
    w = _tricube(u / h_safe[:, None])
    degenerate = np.nonzero(h <= 0)[0]
    if degenerate.size:
        w[degenerate, :] = 0.0
        w[degenerate, (rows - lo)[degenerate]] = 1.0
    s0 = w.sum(axis=1, keepdims=True)
    wn = w / np.where(s0 > 0, s0, 1.0)
    if degree == 1:
        a = (wn * u).sum(axis=1)
        d = u - a[:, None]
        c = (wn * d * d).sum(axis=1)
        usable = c > _SPREAD_TOL * np.maximum(h, 1.0) ** 2
        adj = np.where(usable[:, None], 1.0 + (-a[:, None]) * d / np.where(
            usable, c, 1.0)[:, None], 1.0)
        wn = wn * adj
    return wn


def _kernels_for(n: int, q: int, degree: int):
    key = (n, q, degree)
    hit = _kernel_cache.get(key)
    if hit is not None:
        return hit
    if q >= n:
        rows = np.arange(n)
        lo = np.zeros(n, dtype=int)
        full = _equivalent_kernel_rows(n, q, degree, rows, lo)
        entry = ("full", full)
    else:
        m = (q - 1) // 2
        # interior windows are symmetric, so the degree-1 correction vanishes
        j = np.arange(q, dtype=float)
        w = _tricube((j - m) / m) if m > 0 else np.ones(1)
        kern = w / w.sum()
        left_rows = np.arange(m)
        kl = _equivalent_kernel_rows(n, q, degree, left_rows,
                                     np.zeros(m, dtype=int))
        right_rows = np.arange(n - m, n)
        kr = _equivalent_kernel_rows(n, q, degree, right_rows,
                                     np.full(m, n - q, dtype=int))
        entry = ("split", kern, kl, kr)
    if len(_kernel_cache) >= _KERNEL_CACHE_MAX:
        _kernel_cache.clear()
    _kernel_cache[key] = entry
    return entry


def _smooth_uniform(y: np.ndarray, q: int, degree: int) -> np.ndarray:
    n = len(y)
    entry = _kernels_for(n, q, degree)
    if entry[0] == "full":
        return entry[1] @ y
    _, kern, kl, kr = entry
    m = (q - 1) // 2
    out = np.empty(n)
    out[m : n - m] = np.convolve(y, kern, mode="valid")
    if m:
        out[:m] = kl @ y[:q]
        out[n - m :] = kr @ y[n - q :]
    return out


def _smooth_weighted(y: np.ndarray, q: int, degree: int, rw: np.ndarray) -> np.ndarray:
    n = len(y)
    if q >= n:
        lo = np.zeros(n, dtype=int)
        rows = np.arange(n)
        h = np.maximum(rows, n - 1 - rows).astype(float) + (q - n) // 2
        u = np.arange(n, dtype=float)[None, :] - rows[:, None]
        w = _tricube(u / np.where(h > 0, h, 1.0)[:, None]) * rw[None, :]
        yy = np.broadcast_to(y, (n, n))
        return _rowwise_fit(u, w, yy, degree, h, fallback=y)
    m = (q - 1) // 2
    lo = np.clip(np.arange(n) - m, 0, n - q)
    windows = np.lib.stride_tricks.sliding_window_view(y, q)[lo]
    rw_windows = np.lib.stride_tricks.sliding_window_view(rw, q)[lo]
    rows = np.arange(n)
    u = lo[:, None] + np.arange(q, dtype=float)[None, :] - rows[:, None]
    h = np.maximum(rows - lo, lo + q - 1 - rows).astype(float)
    w = _tricube(u / np.where(h > 0, h, 1.0)[:, None]) * rw_windows
    return _rowwise_fit(u, w, windows, degree, h, fallback=y)


def loess_smooth(series: np.ndarray, params: LoessParams) -> np.ndarray:
    """Smooth a 1-D series; returns an array of the same length.

    Windows of zero total weight (possible when robustness weights vanish
    across a whole window) fall back to the raw sample value.
    """
    y = _validate(series, params)
    if params.robustness_weights is None:
        return _smooth_uniform(y, params.span, params.degree)
    rw = np.asarray(params.robustness_weights, dtype=float)
    return _smooth_weighted(y, params.span, params.degree, rw)
