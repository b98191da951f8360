"""Command-line entry points: ``jamnet train`` and ``jamnet evaluate``.

``train`` holds out a seeded test split, runs staged cross-validated
training on the rest, and saves per-fold weights plus a ``train_meta.json``
describing the run.  ``evaluate`` reloads the fold models, re-derives the
identical test split from the metadata, and writes ``confusion.csv`` and
``report.json`` next to the models.

Exit codes: 0 success, 1 bad configuration or arguments, 2 missing or
malformed input files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

from .data import DatasetFormatError, load_dataset, split_train_test
from .model import CnnLstmSpec, ConvStage, ModelConfigError, build_model
from .train import TrainSchedule, seed_everything, staged_train

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

META_FILENAME = "train_meta.json"


def _spec_to_dict(spec: CnnLstmSpec) -> dict:
    d = asdict(spec)
    d["conv_stages"] = [list(asdict(s).values()) for s in spec.conv_stages]
    return d


def _spec_from_dict(d: dict) -> CnnLstmSpec:
    stages = tuple(ConvStage(*map(int, s[:2]), int(s[2])) for s in d["conv_stages"])
    return CnnLstmSpec(
        input_length=int(d["input_length"]),
        conv_stages=stages,
        lstm_units=int(d["lstm_units"]),
        dropout_rate=float(d["dropout_rate"]),
        dense_units=int(d["dense_units"]),
        num_classes=int(d["num_classes"]),
        conv_l2=float(d["conv_l2"]),
        dense_l2=float(d["dense_l2"]),
    )


def cmd_train(args: argparse.Namespace) -> int:
    x, labels = load_dataset(args.data)
    if len(labels) == 0:
        raise DatasetFormatError(f"{args.data}: dataset is empty")
    print(f"loaded {len(labels)} blocks of {x.shape[1]} bins from {args.data}")
    seed_everything(args.seed, deterministic=not args.fast)
    x_train, y_train, x_test, y_test = split_train_test(
        x, labels, test_fraction=args.test_fraction, seed=args.seed
    )
    print(
        f"split: {len(y_train)} train / {len(y_test)} held-out test "
        f"(fraction {args.test_fraction}, seed {args.seed})"
    )
    spec = CnnLstmSpec(input_length=x.shape[1])
    schedule = TrainSchedule(epoch_cap=args.epoch_cap)
    os.makedirs(args.out_dir, exist_ok=True)
    results, _ = staged_train(
        x_train,
        y_train,
        schedule=schedule,
        spec=spec,
        folds=args.folds,
        seed=args.seed,
        out_dir=args.out_dir,
        verbose=not args.quiet,
    )
    meta = {
        "data_path": os.path.abspath(args.data),
        "seed": args.seed,
        "test_fraction": args.test_fraction,
        "folds": args.folds,
        "spec": _spec_to_dict(spec),
        "schedule": asdict(schedule),
        "fold_summaries": [r.summary() for r in results],
    }
    with open(os.path.join(args.out_dir, META_FILENAME), "w") as fh:
        json.dump(meta, fh, indent=2)
    for r in results:
        status = "ok" if r.success else f"incomplete ({r.failure_reason})"
        print(
            f"fold {r.fold_index}: {status}; epochs {r.epochs_used}, "
            f"rollbacks {r.rollbacks}, final val accuracy {r.final_val_accuracy:.4f}"
        )
    print(f"models and histories written under {args.out_dir}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    from .evaluate import evaluate_ensemble, format_report, write_confusion_csv, write_report_json

    meta_path = os.path.join(args.models, META_FILENAME)
    with open(meta_path) as fh:
        meta = json.load(fh)
    data_path = args.data if args.data is not None else meta["data_path"]
    x, labels = load_dataset(data_path)
    _, _, x_test, y_test = split_train_test(
        x, labels, test_fraction=meta["test_fraction"], seed=meta["seed"]
    )
    print(
        f"evaluating {len(y_test)} held-out blocks from {data_path} "
        f"with {meta['folds']} fold models"
    )
    spec = _spec_from_dict(meta["spec"])
    models = []
    for fold_index in range(meta["folds"]):
        weights = os.path.join(args.models, f"fold_{fold_index}", "final.weights.h5")
        if not os.path.exists(weights):
            raise FileNotFoundError(f"missing fold weights: {weights}")
        model = build_model(spec)
        model.load_weights(weights)
        models.append(model)
    result = evaluate_ensemble(models, x_test, y_test)
    out_dir = args.out_dir if args.out_dir is not None else args.models
    os.makedirs(out_dir, exist_ok=True)
    write_confusion_csv(os.path.join(out_dir, "confusion.csv"), result.confusion)
    write_report_json(os.path.join(out_dir, "report.json"), result)
    print(format_report(result))
    print(f"confusion.csv and report.json written under {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamnet",
        description="Train and evaluate the convolutional-recurrent jamming classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="staged cross-validated training")
    p_train.add_argument("--data", required=True, help="dataset file (.jamd or .csv)")
    p_train.add_argument("--folds", type=int, default=5)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out-dir", default="models")
    p_train.add_argument("--test-fraction", type=float, default=0.3)
    p_train.add_argument("--epoch-cap", type=int, default=40)
    p_train.add_argument(
        "--fast",
        action="store_true",
        help="skip deterministic-op mode for faster training",
    )
    p_train.add_argument("--quiet", action="store_true", help="suppress per-epoch lines")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="ensemble evaluation on the held-out split")
    p_eval.add_argument("--models", required=True, help="directory written by train")
    p_eval.add_argument(
        "--data",
        default=None,
        help="dataset file (defaults to the path recorded at training time)",
    )
    p_eval.add_argument("--out-dir", default=None, help="where to write reports")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except (DatasetFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ModelConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
