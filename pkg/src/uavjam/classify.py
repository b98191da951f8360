"""One-dimensional binary classifiers over the reconstruction-error feature.

Three interchangeable fitters: an exhaustive optimal-threshold search, a
logistic regression trained by full-batch gradient descent, and a
soft-margin linear support-vector machine trained by deterministic
subgradient descent with iterate averaging.  All operate on a single
feature; positive class = jamming.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .dataset import _atomic_write, writer_path_check
from .errors import ConfigError, DataFormatError, DomainError
from .features import JAMMING, NORMAL, FeatureRow

KIND_THRESHOLD = "threshold"
KIND_LOGISTIC = "logistic"
KIND_SVM = "svm"


@dataclass
class ClassifierModel:
    kind: str
    params: dict
    training: dict = field(default_factory=dict)


def _features_labels(rows: Sequence[FeatureRow]) -> tuple[np.ndarray, np.ndarray]:
    if not rows:
        raise ConfigError("no feature rows supplied")
    x = np.array([r.rmse for r in rows], dtype=float)
    y = np.array([r.binary_label for r in rows], dtype=int)
    if not np.all(np.isfinite(x)):
        raise DomainError("non-finite feature value")
    if len(set(y.tolist())) < 2:
        raise ConfigError("training data must contain both classes")
    return x, y


def predict(model: ClassifierModel, x: np.ndarray) -> np.ndarray:
    """Predicted labels (jamming=1) for an array of feature values."""
    x = np.asarray(x, dtype=float)
    p = model.params
    if model.kind == KIND_THRESHOLD:
        if p["direction"] >= 0:
            return (x > p["threshold"]).astype(int)
        return (x < p["threshold"]).astype(int)
    if model.kind in (KIND_LOGISTIC, KIND_SVM):
        return (p["weight"] * x + p["bias"] >= 0).astype(int)
    raise ConfigError(f"unknown classifier kind {model.kind!r}")


def _accuracy(model: ClassifierModel, x: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(predict(model, x) == y))


def fit_threshold(rows: Sequence[FeatureRow]) -> ClassifierModel:
    """Exhaustive search over split points in the 1-D feature.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values plus the two all-one-class edges (so a majority vote is always a
    candidate).  Ties go to the lower threshold, and for one threshold to
    the jamming-below direction.
    """
    x, y = _features_labels(rows)
    distinct = np.unique(x)
    candidates = [-math.inf]
    candidates += ((distinct[:-1] + distinct[1:]) / 2.0).tolist()
    candidates += [math.inf]
    best = None
    best_acc = -1.0
    for t in candidates:
        for direction in (-1, 1):
            trial = ClassifierModel(kind=KIND_THRESHOLD,
                                    params={"threshold": t,
                                            "direction": direction})
            acc = _accuracy(trial, x, y)
            if acc > best_acc:
                best, best_acc = trial, acc
    best.training = {"train_accuracy": best_acc, "candidates": len(candidates)}
    return best


def logistic_loss_and_grad(w: float, b: float, x: np.ndarray, y01: np.ndarray,
                           l2: float) -> tuple[float, float, float]:
    """Mean regularized log-loss and its (dw, db) gradient.

    Written with log1p/exp guarded by sign so large margins neither
    overflow nor lose precision.
    """
    s = np.where(y01 == 1, 1.0, -1.0)
    z = s * (w * x + b)
    loss = float(np.mean(np.logaddexp(0.0, -z))) + 0.5 * l2 * w * w
    sig = expit(-z)
    dw = float(np.mean(-s * sig * x)) + l2 * w
    db = float(np.mean(-s * sig))
    return loss, dw, db


def fit_logistic(rows: Sequence[FeatureRow], lr: float = 0.5,
                 epochs: int = 10_000, l2: float = 0.0) -> ClassifierModel:
    """Full-batch gradient descent on the standardized feature.

    Converged when the loss improves by less than 1e-8 between epochs.
    The stored weight/bias are mapped back to the raw feature scale.
    """
    if lr <= 0:
        raise ConfigError("learning rate must be positive")
    x, y = _features_labels(rows)
    mu, sigma = float(np.mean(x)), float(np.std(x))
    sigma = sigma if sigma > 0 else 1.0
    xs = (x - mu) / sigma
    w = b = 0.0
    loss_prev = math.inf
    iterations = 0
    for iterations in range(1, epochs + 1):
        loss, dw, db = logistic_loss_and_grad(w, b, xs, y, l2)
        w -= lr * dw
        b -= lr * db
        if abs(loss_prev - loss) < 1e-8:
            break
        loss_prev = loss
    w_raw = w / sigma
    b_raw = b - w * mu / sigma
    model = ClassifierModel(
        kind=KIND_LOGISTIC,
        params={"weight": w_raw, "bias": b_raw},
        training={"iterations": iterations, "loss": loss,
                  "converged": iterations < epochs,
                  "feature_mean": mu, "feature_std": sigma})
    model.training["train_accuracy"] = _accuracy(model, x, y)
    return model


def svm_objective(w: float, b: float, x: np.ndarray, y01: np.ndarray,
                  lam: float) -> float:
    s = np.where(y01 == 1, 1.0, -1.0)
    hinge = np.maximum(0.0, 1.0 - s * (w * x + b))
    return 0.5 * lam * w * w + float(np.mean(hinge))


def fit_linear_svm(rows: Sequence[FeatureRow], c: float = 1.0,
                   epochs: int = 2000) -> ClassifierModel:
    """Deterministic subgradient descent on the soft-margin objective.

    Standardized feature, decaying step 1/(lam*(t+1)), averaged iterates as
    the returned solution (the average's objective settles monotonically).
    """
    if c <= 0:
        raise ConfigError("C must be positive")
    x, y = _features_labels(rows)
    mu, sigma = float(np.mean(x)), float(np.std(x))
    sigma = sigma if sigma > 0 else 1.0
    xs = (x - mu) / sigma
    s = np.where(y == 1, 1.0, -1.0)
    lam = 1.0 / c
    w = b = 0.0
    w_sum = b_sum = 0.0
    n = xs.size
    history = []
    for t in range(1, epochs + 1):
        margin = s * (w * xs + b)
        active = margin < 1.0
        dw = lam * w - float(np.sum(s[active] * xs[active])) / n
        db = -float(np.sum(s[active])) / n
        step = 1.0 / (lam * (t + 1))
        w -= step * dw
        b -= step * db
        w_sum += w
        b_sum += b
        if t % 10 == 0 or t == epochs:
            history.append(svm_objective(w_sum / t, b_sum / t, xs, y, lam))
    w_avg, b_avg = w_sum / epochs, b_sum / epochs
    w_raw = w_avg / sigma
    b_raw = b_avg - w_avg * mu / sigma
    model = ClassifierModel(
        kind=KIND_SVM,
        params={"weight": w_raw, "bias": b_raw},
        training={"iterations": epochs,
                  "objective": svm_objective(w_avg, b_avg, xs, y, lam),
                  "objective_history": history,
                  "feature_mean": mu, "feature_std": sigma})
    model.training["train_accuracy"] = _accuracy(model, x, y)
    return model


FITTERS = {
    KIND_THRESHOLD: fit_threshold,
    KIND_LOGISTIC: fit_logistic,
    KIND_SVM: fit_linear_svm,
}


def save_model(model: ClassifierModel, path: str) -> None:
    payload = {"kind": model.kind, "params": model.params,
               "training": model.training}
    writer_path_check(path)
    _atomic_write(path, lambda fh: fh.write(
        json.dumps(payload, indent=2).encode()))


def load_model(path: str) -> ClassifierModel:
    with open(path, "rb") as fh:
        payload = json.loads(fh.read().decode())
    for key in ("kind", "params"):
        if key not in payload:
            raise DataFormatError(f"model file missing {key!r}")
    return ClassifierModel(kind=payload["kind"], params=payload["params"],
                           training=payload.get("training", {}))
