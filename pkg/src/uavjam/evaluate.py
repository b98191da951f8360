"""Evaluation: confusion metrics, scenario-hygienic splits, accuracy sweeps.

Splits operate on whole scenarios so no scenario contributes samples to
both sides (triples from one scenario share fading statistics and jammed
bins, so row-level splits would leak).  The sweep trains and scores one
model per (jammer distance, power ratio) cell, reusing the shared pool of
normal scenarios.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .classify import ClassifierModel, predict
from .dataset import _atomic_write, writer_path_check
from .errors import ConfigError
from .features import JAMMING, FeatureRow

CLASS_NAMES = {0: "normal", 1: "jamming"}


@dataclass
class EvalReport:
    confusion: np.ndarray  # rows = true (normal, jamming), cols = predicted
    accuracy: float
    per_class: dict[str, dict[str, float]]
    n_samples: int


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    cm = np.zeros((2, 2), dtype=int)
    for t, p in zip(np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)):
        cm[t, p] += 1
    return cm


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def evaluate(model: ClassifierModel, rows: Sequence[FeatureRow]) -> EvalReport:
    if not rows:
        raise ConfigError("cannot evaluate on an empty row set")
    x = np.array([r.rmse for r in rows], dtype=float)
    y = np.array([r.binary_label for r in rows], dtype=int)
    pred = predict(model, x)
    cm = confusion_matrix(y, pred)
    accuracy = float(np.trace(cm) / cm.sum())
    per_class = {}
    for c, name in CLASS_NAMES.items():
        tp = float(cm[c, c])
        precision = _safe_div(tp, float(cm[:, c].sum()))
        recall = _safe_div(tp, float(cm[c, :].sum()))
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[name] = {"precision": precision, "recall": recall,
                           "f1": f1, "support": int(cm[c, :].sum())}
    return EvalReport(confusion=cm, accuracy=accuracy, per_class=per_class,
                      n_samples=len(rows))


def report_as_dict(report: EvalReport) -> dict:
    return {"confusion": report.confusion.tolist(),
            "accuracy": report.accuracy,
            "per_class": report.per_class,
            "n_samples": report.n_samples}


def _stratum_key(row: FeatureRow):
    return (int(row.channel_class),
            None if math.isnan(row.jammer_distance_m) else row.jammer_distance_m,
            None if math.isnan(row.power_ratio) else row.power_ratio)


def split_by_scenario(rows: Sequence[FeatureRow], test_fraction: float = 0.3,
                      seed: int = 0) -> tuple[list[FeatureRow], list[FeatureRow]]:
    """Scenario-level stratified split.

    Scenarios are shuffled within each (class, jammer distance, power
    ratio) stratum; ``test_fraction`` of each stratum's scenarios (at least
    one when the stratum has two or more) go to the test side.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError("test_fraction must lie in (0, 1)")
    strata: dict[tuple, list[int]] = {}
    for r in rows:
        key = _stratum_key(r)
        ids = strata.setdefault(key, [])
        if r.scenario_id not in ids:
            ids.append(r.scenario_id)
    test_ids: set[int] = set()
    for k, key in enumerate(sorted(strata, key=repr)):
        ids = sorted(strata[key])
        rng = np.random.default_rng([seed, 7_011, k])
        rng.shuffle(ids)
        n = len(ids)
        n_test = min(n - 1, max(1, round(test_fraction * n))) if n >= 2 else 0
        test_ids.update(ids[:n_test])
    train = [r for r in rows if r.scenario_id not in test_ids]
    test = [r for r in rows if r.scenario_id in test_ids]
    return train, test


@dataclass
class SweepResult:
    jammer_distances_m: list[float]
    power_ratios: list[float]
    accuracy: np.ndarray       # shape (distances, ratios); nan = missing cell
    test_counts: np.ndarray    # samples evaluated per cell

    @property
    def overall_mean_accuracy(self) -> float:
        vals = self.accuracy[np.isfinite(self.accuracy)]
        return float(np.mean(vals)) if vals.size else math.nan

    def column(self, power_ratio: float) -> np.ndarray:
        j = self.power_ratios.index(power_ratio)
        return self.accuracy[:, j]

    def row(self, jammer_distance_m: float) -> np.ndarray:
        i = self.jammer_distances_m.index(jammer_distance_m)
        return self.accuracy[i, :]


def _matched_subset(pool: list[FeatureRow], size: int,
                    rng: np.random.Generator) -> list[FeatureRow]:
    if len(pool) <= size:
        return pool
    picked = rng.choice(len(pool), size=size, replace=False)
    return [pool[i] for i in sorted(picked)]


def sweep_accuracy(rows: Sequence[FeatureRow],
                   fitter: Callable[[Sequence[FeatureRow]], ClassifierModel],
                   test_fraction: float = 0.3, seed: int = 0) -> SweepResult:
    """Per-cell train/evaluate over the jammer distance x power grid.

    Each cell's model trains on that cell's jammed training scenarios plus
    a normal-scenario subset drawn (seeded) from the shared pool and sized
    to match, so every cell is a balanced binary task; accuracy comes from
    the held-out scenarios of the same composition.  Cells with no test
    data stay NaN.
    """
    train, test = split_by_scenario(rows, test_fraction, seed)
    jam_train = [r for r in train if r.binary_label == JAMMING]
    jam_test = [r for r in test if r.binary_label == JAMMING]
    normal_train = [r for r in train if r.binary_label != JAMMING]
    normal_test = [r for r in test if r.binary_label != JAMMING]
    jam_rows = jam_train + jam_test
    if not jam_rows:
        raise ConfigError("sweep requires jammed feature rows")
    distances = sorted({r.jammer_distance_m for r in jam_rows})
    ratios = sorted({r.power_ratio for r in jam_rows})
    acc = np.full((len(distances), len(ratios)), math.nan)
    counts = np.zeros((len(distances), len(ratios)), dtype=int)
    for i, d in enumerate(distances):
        for j, p in enumerate(ratios):
            cell_train = [r for r in jam_train
                          if r.jammer_distance_m == d and r.power_ratio == p]
            cell_test = [r for r in jam_test
                         if r.jammer_distance_m == d and r.power_ratio == p]
            if not cell_train or not cell_test:
                continue
            rng = np.random.default_rng([seed, 40_017, i, j])
            model = fitter(cell_train
                           + _matched_subset(normal_train, len(cell_train), rng))
            report = evaluate(model, cell_test
                              + _matched_subset(normal_test, len(cell_test), rng))
            acc[i, j] = report.accuracy
            counts[i, j] = report.n_samples
    return SweepResult(jammer_distances_m=list(distances),
                       power_ratios=list(ratios),
                       accuracy=acc, test_counts=counts)


def spearman_rho(values: Sequence[float]) -> float:
    """Rank correlation of a sequence against its index order."""
    vals = np.asarray(values, dtype=float)
    keep = np.isfinite(vals)
    if keep.sum() < 2:
        return math.nan
    res = spearmanr(np.arange(len(vals))[keep], vals[keep])
    return float(res.statistic)


def write_grid_csv(path: str, result: SweepResult) -> None:
    """Rows = jammer distance buckets, columns = power-ratio buckets.

    Missing cells are left empty, never written as zero.
    """
    def writer(fh):
        text = io.TextIOWrapper(fh, encoding="utf-8", newline="")
        w = csv.writer(text)
        w.writerow(["jammer_distance_m"]
                   + [f"power_ratio_{p:g}" for p in result.power_ratios])
        for i, d in enumerate(result.jammer_distances_m):
            row = [f"{d:g}"]
            for j in range(len(result.power_ratios)):
                v = result.accuracy[i, j]
                row.append("" if not np.isfinite(v) else repr(float(v)))
            w.writerow(row)
        text.flush()
        text.detach()
    writer_path_check(path)
    _atomic_write(path, writer)
