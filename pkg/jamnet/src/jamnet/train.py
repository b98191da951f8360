"""Staged training with validation-accuracy checkpoints and rollback.

Training walks a ladder of validation-accuracy targets.  Each epoch ends
with a validation pass; reaching the current target snapshots the weights
and advances to the next rung.  If accuracy regresses below the previous
rung's achieved level, the previous snapshot is restored and the learning
rate and batch size are halved — at most ``max_retries`` times per rung.
The final rung runs at an escalated learning rate and batch size to grind
out the last fraction of a percent.  A fold that exhausts its epoch budget
or its retries reports failure with its full history instead of raising.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .data import kfold_indices
from .model import CnnLstmSpec, build_model, prepare_inputs

ADVANCE = "advance"
CONTINUE = "continue"
ROLLBACK = "rollback"
FAIL = "fail"


@dataclass(frozen=True)
class TrainSchedule:
    """Checkpoint ladder and optimizer settings for staged training."""

    checkpoints: tuple[float, ...] = (0.80, 0.90, 0.95, 0.9999)
    base_learning_rate: float = 3.16e-3
    base_batch_size: int = 32
    final_learning_rate: float = 0.2
    final_batch_size: int = 2048
    max_retries: int = 3
    epoch_cap: int = 40
    #: Global-norm gradient clip for the SGD updates.  LSTMs trained with
    #: plain SGD are prone to exploding gradients that collapse the model
    #: mid-run; clipping caps the update size without changing the
    #: optimizer family or learning rates.  ``None`` disables clipping.
    gradient_clip_norm: float | None = 1.0

    def __post_init__(self) -> None:
        if not self.checkpoints:
            raise ValueError("schedule needs at least one checkpoint")
        prev = 0.0
        for c in self.checkpoints:
            if not prev < c <= 1.0:
                raise ValueError(
                    f"checkpoints must be strictly increasing in (0, 1], "
                    f"got {self.checkpoints}"
                )
            prev = c
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.epoch_cap < 1:
            raise ValueError("epoch_cap must be >= 1")
        if min(self.base_batch_size, self.final_batch_size) < 1:
            raise ValueError("batch sizes must be >= 1")
        if self.gradient_clip_norm is not None and self.gradient_clip_norm <= 0:
            raise ValueError("gradient_clip_norm must be positive or None")

    def step_settings(self, step_index: int) -> tuple[float, int]:
        """(learning rate, batch size) for a rung; the last rung escalates."""
        if step_index == len(self.checkpoints) - 1:
            return self.final_learning_rate, self.final_batch_size
        return self.base_learning_rate, self.base_batch_size


def next_action(
    val_accuracy: float,
    target: float,
    previous_achieved: float | None,
    retries: int,
    max_retries: int,
) -> str:
    """Decide what to do after an epoch: advance, continue, roll back, or fail.

    ``previous_achieved`` is the validation accuracy recorded when the
    previous rung was reached (``None`` on the first rung, where no
    snapshot exists to roll back to).
    """
    if val_accuracy >= target:
        return ADVANCE
    if previous_achieved is not None and val_accuracy < previous_achieved:
        return FAIL if retries >= max_retries else ROLLBACK
    return CONTINUE


@dataclass
class FoldResult:
    """Outcome of staged training on one cross-validation fold."""

    fold_index: int
    success: bool
    epochs_used: int
    rollbacks: int
    reached: list[dict] = field(default_factory=list)
    epoch_log: list[dict] = field(default_factory=list)
    final_val_accuracy: float = 0.0
    failure_reason: str | None = None

    def summary(self) -> dict:
        return {
            "fold": self.fold_index,
            "success": self.success,
            "epochs_used": self.epochs_used,
            "rollbacks": self.rollbacks,
            "checkpoints_reached": [r["target"] for r in self.reached],
            "final_val_accuracy": self.final_val_accuracy,
            "failure_reason": self.failure_reason,
        }


def seed_everything(seed: int, deterministic: bool = True) -> None:
    """Seed Python/NumPy/TensorFlow RNGs; optionally force deterministic ops."""
    import tensorflow as tf

    tf.keras.utils.set_random_seed(seed)
    if deterministic:
        tf.config.experimental.enable_op_determinism()


def _step_name(target: float) -> str:
    return f"step_{target:.4f}"


def make_optimizer(schedule: TrainSchedule):
    """SGD at the schedule's base rate with its gradient clipping applied."""
    from tensorflow import keras

    kwargs = {"learning_rate": schedule.base_learning_rate}
    if schedule.gradient_clip_norm is not None:
        kwargs["clipnorm"] = schedule.gradient_clip_norm
    return keras.optimizers.SGD(**kwargs)


def train_fold(
    model,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    schedule: TrainSchedule,
    fold_index: int = 0,
    out_dir: str | None = None,
    verbose: bool = False,
) -> FoldResult:
    """Run the checkpoint ladder on an already-built, compiled model."""
    result = FoldResult(fold_index=fold_index, success=False, epochs_used=0, rollbacks=0)
    snapshots: list[tuple[float, list]] = []  # (achieved val accuracy, weights)
    epoch = 0

    for step_index, target in enumerate(schedule.checkpoints):
        lr, batch = schedule.step_settings(step_index)
        retries = 0
        model.optimizer.learning_rate.assign(lr)
        while True:
            if epoch >= schedule.epoch_cap:
                result.failure_reason = (
                    f"epoch cap {schedule.epoch_cap} hit before reaching {target}"
                )
                result.epochs_used = epoch
                result.final_val_accuracy = _val_accuracy(model, x_val, y_val)
                return result
            hist = model.fit(
                x_train,
                y_train,
                epochs=1,
                batch_size=batch,
                shuffle=True,
                verbose=0,
            )
            epoch += 1
            val_acc = _val_accuracy(model, x_val, y_val)
            result.epoch_log.append(
                {
                    "epoch": epoch,
                    "target": target,
                    "learning_rate": lr,
                    "batch_size": batch,
                    "train_loss": float(hist.history["loss"][0]),
                    "val_accuracy": val_acc,
                }
            )
            if verbose:
                print(
                    f"  fold {fold_index} epoch {epoch:>3}: "
                    f"target {target:.4f}  lr {lr:.5f}  batch {batch:>4}  "
                    f"loss {hist.history['loss'][0]:.4f}  val_acc {val_acc:.4f}",
                    flush=True,
                )
            previous = snapshots[-1][0] if snapshots else None
            action = next_action(val_acc, target, previous, retries, schedule.max_retries)
            if action == ADVANCE:
                snapshots.append((val_acc, model.get_weights()))
                result.reached.append(
                    {"target": target, "val_accuracy": val_acc, "epoch": epoch}
                )
                if out_dir is not None:
                    stem = os.path.join(out_dir, _step_name(target))
                    model.save_weights(stem + ".weights.h5")
                    with open(stem + ".json", "w") as fh:
                        json.dump(
                            {
                                "target": target,
                                "val_accuracy": val_acc,
                                "epoch": epoch,
                                "epoch_log": result.epoch_log,
                            },
                            fh,
                            indent=2,
                        )
                break
            if action == ROLLBACK:
                model.set_weights(snapshots[-1][1])
                lr = lr / 2.0
                batch = max(1, batch // 2)
                model.optimizer.learning_rate.assign(lr)
                retries += 1
                result.rollbacks += 1
                result.epoch_log.append(
                    {
                        "epoch": epoch,
                        "event": "rollback",
                        "target": target,
                        "learning_rate": lr,
                        "batch_size": batch,
                        "retries": retries,
                    }
                )
                continue
            if action == FAIL:
                model.set_weights(snapshots[-1][1])
                result.failure_reason = (
                    f"regressed below previous checkpoint {retries + 1} times "
                    f"while chasing {target}"
                )
                result.epochs_used = epoch
                result.final_val_accuracy = snapshots[-1][0]
                return result
            # CONTINUE: another epoch at the same settings.

    result.success = True
    result.epochs_used = epoch
    result.final_val_accuracy = result.reached[-1]["val_accuracy"]
    return result


def _val_accuracy(model, x_val: np.ndarray, y_val: np.ndarray) -> float:
    probs = model.predict(x_val, batch_size=2048, verbose=0)
    return float(np.mean(np.argmax(probs, axis=1) == y_val))


def staged_train(
    features: np.ndarray,
    labels: np.ndarray,
    schedule: TrainSchedule = TrainSchedule(),
    spec: CnnLstmSpec = CnnLstmSpec(),
    folds: int = 5,
    seed: int = 0,
    out_dir: str | None = None,
    verbose: bool = False,
) -> tuple[list[FoldResult], list]:
    """Cross-validated staged training; returns fold results and fold models.

    ``features`` must already be normalized to the network's input scale;
    the channel axis is added here.  When ``out_dir`` is given, each fold
    writes its per-rung weight snapshots, its final weights, and a
    ``history.json`` under ``out_dir/fold_<i>/``.
    """
    x = prepare_inputs(features)
    y = np.asarray(labels, dtype=np.int64)
    results: list[FoldResult] = []
    models: list = []
    for fold_index, (train_idx, val_idx) in enumerate(
        kfold_indices(len(y), folds, seed=seed)
    ):
        fold_dir = None
        if out_dir is not None:
            fold_dir = os.path.join(out_dir, f"fold_{fold_index}")
            os.makedirs(fold_dir, exist_ok=True)
        model = build_model(spec)
        model.compile(
            optimizer=make_optimizer(schedule),
            loss="sparse_categorical_crossentropy",
            metrics=["accuracy"],
        )
        result = train_fold(
            model,
            x[train_idx],
            y[train_idx],
            x[val_idx],
            y[val_idx],
            schedule,
            fold_index=fold_index,
            out_dir=fold_dir,
            verbose=verbose,
        )
        results.append(result)
        models.append(model)
        if fold_dir is not None:
            model.save_weights(os.path.join(fold_dir, "final.weights.h5"))
            history = {
                "schedule": asdict(schedule),
                "summary": result.summary(),
                "epoch_log": result.epoch_log,
                "checkpoints_reached": result.reached,
            }
            with open(os.path.join(fold_dir, "history.json"), "w") as fh:
                json.dump(history, fh, indent=2)
    return results, models
