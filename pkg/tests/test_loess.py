"""Loess smoother checks against a dense weighted-least-squares oracle.

The oracle below builds each local fit explicitly with numpy.linalg.lstsq,
sharing only the window/bandwidth conventions (which are definitional),
so it exercises an independent arithmetic path from the production code.
"""

import numpy as np
import pytest

from uavjam.errors import ConfigError, DomainError
from uavjam.loess import LoessParams, loess_smooth


def tricube(r):
    r = np.clip(r, 0.0, 1.0)
    return (1.0 - r**3) ** 3


def dense_loess_oracle(y, span, degree, rw=None):
    """Per-point weighted LS fit via lstsq over the q-nearest window."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    x = np.arange(n, dtype=float)
    rw = np.ones(n) if rw is None else np.asarray(rw, dtype=float)
    out = np.empty(n)
    for i in range(n):
        if span >= n:
            lo, hi = 0, n - 1
            h = max(i, n - 1 - i) + (span - n) // 2
        else:
            lo = min(max(i - (span - 1) // 2, 0), n - span)
            hi = lo + span - 1
            h = max(i - lo, hi - i)
        xs = x[lo : hi + 1]
        w = tricube(np.abs(xs - i) / h if h > 0 else np.zeros_like(xs)) * rw[lo : hi + 1]
        cols = [np.ones_like(xs)] + ([xs - i] if degree == 1 else [])
        a = np.stack(cols, axis=1) * np.sqrt(w)[:, None]
        b = y[lo : hi + 1] * np.sqrt(w)
        coef, *_ = np.linalg.lstsq(a, b, rcond=None)
        out[i] = coef[0]
    return out


def test_degree1_reproduces_affine_all_spans():
    n = 50
    x = np.arange(n)
    y = 3.0 * x - 7.0
    for span in (3, 7, 25, 49, 101):
        got = loess_smooth(y, LoessParams(span=span, degree=1))
        np.testing.assert_allclose(got, y, rtol=0, atol=1e-9 * np.abs(y).max())


def test_degree0_constant_any_span():
    y = np.full(40, 4.25)
    for span in (3, 11, 81):
        got = loess_smooth(y, LoessParams(span=span, degree=0))
        np.testing.assert_allclose(got, y, rtol=0, atol=1e-12)


def test_alternating_midpoint_matches_dense_fit():
    y = np.array([0.0, 1.0, 0.0, 1.0, 0.0])
    got = loess_smooth(y, LoessParams(span=3, degree=1))
    want = dense_loess_oracle(y, 3, 1)
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)
    # span-3 window at the midpoint gives zero weight to both neighbors,
    # so the local fit collapses onto the center sample.
    assert abs(got[2] - 0.0) < 1e-12


def test_matches_dense_oracle_on_random_series():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(5, 60))
        y = rng.normal(size=n) * rng.uniform(0.1, 30)
        span = int(rng.choice([3, 5, 7, 9, 15, 31]))
        span = min(span, n if n % 2 == 1 else n - 1)
        degree = int(rng.integers(0, 2))
        got = loess_smooth(y, LoessParams(span=span, degree=degree))
        want = dense_loess_oracle(y, span, degree)
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


def test_span_larger_than_series_matches_dense_oracle():
    rng = np.random.default_rng(11)
    y = rng.normal(size=9)
    for span, degree in ((11, 0), (11, 1), (91, 0), (91, 1)):
        got = loess_smooth(y, LoessParams(span=span, degree=degree))
        want = dense_loess_oracle(y, span, degree)
        np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)


def test_robustness_weights_down_weight_outliers():
    rng = np.random.default_rng(3)
    y = rng.normal(size=30)
    y_spiked = y.copy()
    y_spiked[14] += 100.0
    rw = np.ones(30)
    rw[14] = 0.0
    got = loess_smooth(y_spiked, LoessParams(span=7, degree=1, robustness_weights=rw))
    want = dense_loess_oracle(y_spiked, 7, 1, rw=rw)
    np.testing.assert_allclose(got, want, rtol=1e-9, atol=1e-9)
    # the spike carries zero weight, so the smooth stays near the clean data
    clean = loess_smooth(y, LoessParams(span=7, degree=1))
    assert abs(got[14] - clean[14]) < 1.0


def test_rejects_bad_params():
    y = np.arange(10.0)
    with pytest.raises(ConfigError):
        loess_smooth(y, LoessParams(span=4, degree=1))  # even span
    with pytest.raises(ConfigError):
        loess_smooth(y, LoessParams(span=1, degree=1))  # span < degree + 1
    with pytest.raises(ConfigError):
        loess_smooth(y, LoessParams(span=5, degree=2))  # unsupported degree
    with pytest.raises(DomainError):
        loess_smooth(np.array([1.0, np.nan, 2.0]), LoessParams(span=3, degree=0))
    with pytest.raises(DomainError):
        loess_smooth(np.array([]), LoessParams(span=3, degree=0))
    with pytest.raises(ConfigError):
        bad_rw = np.ones(4)
        loess_smooth(y, LoessParams(span=3, degree=1, robustness_weights=bad_rw))
