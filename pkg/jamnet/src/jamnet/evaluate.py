"""Ensemble evaluation: confusion matrix and per-class metrics.

The cross-validation folds each produce a trained model; test-time
predictions average the folds' softmax outputs before taking the argmax.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .data import CLASS_NAMES, NUM_CLASSES
from .model import prepare_inputs


def ensemble_probabilities(models, features: np.ndarray, batch_size: int = 2048) -> np.ndarray:
    """Mean softmax over the fold models; shape ``(n, num_classes)``."""
    if not models:
        raise ValueError("need at least one model to evaluate")
    x = prepare_inputs(features)
    total = None
    for model in models:
        probs = model.predict(x, batch_size=batch_size, verbose=0)
        total = probs if total is None else total + probs
    return total / len(models)


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> np.ndarray:
    """Counts with true classes on rows and predicted classes on columns."""
    matrix = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for t, p in zip(np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)):
        matrix[t, p] += 1
    return matrix


@dataclass
class EvalResult:
    """Test-set metrics for an ensemble."""

    accuracy: float
    confusion: np.ndarray
    per_class: dict[str, dict[str, float]]
    n_samples: int
    n_misclassified: int

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n_samples": self.n_samples,
            "n_misclassified": self.n_misclassified,
            "misclassification_rate": (
                self.n_misclassified / self.n_samples if self.n_samples else 0.0
            ),
            "confusion_rows_true_cols_pred": self.confusion.tolist(),
            "class_names": list(CLASS_NAMES),
            "per_class": self.per_class,
        }


def summarize(y_true: np.ndarray, y_pred: np.ndarray) -> EvalResult:
    """Build the full metric bundle from true and predicted labels."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    matrix = confusion_matrix(y_true, y_pred)
    n = int(matrix.sum())
    correct = int(np.trace(matrix))
    per_class: dict[str, dict[str, float]] = {}
    for k, name in enumerate(CLASS_NAMES):
        support = int(matrix[k].sum())
        predicted = int(matrix[:, k].sum())
        tp = int(matrix[k, k])
        recall = tp / support if support else 0.0
        precision = tp / predicted if predicted else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        per_class[name] = {
            "support": support,
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "error_rate": 1.0 - recall,
        }
    return EvalResult(
        accuracy=correct / n if n else 0.0,
        confusion=matrix,
        per_class=per_class,
        n_samples=n,
        n_misclassified=n - correct,
    )


def evaluate_ensemble(models, features: np.ndarray, labels: np.ndarray) -> EvalResult:
    """Ensemble-predict ``features`` and score against ``labels``."""
    probs = ensemble_probabilities(models, features)
    y_pred = np.argmax(probs, axis=1)
    return summarize(labels, y_pred)


def write_confusion_csv(path: str, confusion: np.ndarray) -> None:
    """CSV with class-name row/column headers; rows are true classes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\pred", *CLASS_NAMES])
        for name, row in zip(CLASS_NAMES, confusion):
            writer.writerow([name, *[int(v) for v in row]])


def write_report_json(path: str, result: EvalResult) -> None:
    with open(path, "w") as fh:
        json.dump(result.as_dict(), fh, indent=2)


def format_report(result: EvalResult) -> str:
    """Human-readable evaluation summary for terminal output."""
    lines = [
        f"test samples        : {result.n_samples}",
        f"accuracy            : {result.accuracy:.4f}",
        f"misclassified       : {result.n_misclassified} "
        f"({result.n_misclassified / max(result.n_samples, 1):.4%})",
        "",
        "confusion (rows = true, cols = predicted):",
    ]
    header = " " * 14 + "".join(f"{name:>14}" for name in CLASS_NAMES)
    lines.append(header)
    for name, row in zip(CLASS_NAMES, result.confusion):
        lines.append(f"{name:>14}" + "".join(f"{int(v):>14}" for v in row))
    lines.append("")
    lines.append(
        f"{'class':>14}{'support':>10}{'precision':>11}{'recall':>9}{'f1':>9}"
    )
    for name, stats in result.per_class.items():
        lines.append(
            f"{name:>14}{stats['support']:>10}"
            f"{stats['precision']:>11.4f}{stats['recall']:>9.4f}{stats['f1']:>9.4f}"
        )
    return "\n".join(lines)
