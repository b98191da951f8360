"""Command-line orchestration of the full detection pipeline.

Subcommands: generate, decompose, features, train, evaluate, sweep.  Exit
codes: 0 success, 1 usage/configuration error, 2 I/O or file-format
error, 3 numeric/data-domain failure.  Every output file gets a JSON run
manifest written atomically next to it (``<output>.manifest.json``)
recording the fully resolved configuration and seed, which is enough to
re-run the command identically; manifests are the only outputs carrying
timestamps, so data files stay bit-reproducible.

Configuration precedence, lowest to highest: built-in preset defaults
(``--preset``), a JSON config file (``--config``), explicit flags.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .channel import CALIBRATED_CHANNEL, ChannelParams
from .classify import FITTERS, load_model, save_model
from .dataset import (
    DatasetSpec,
    FULL_SCALE_TOTAL_BLOCKS,
    _atomic_write,
    export_csv,
    generate_dataset,
    read_dataset,
    read_sidecar,
    sidecar_path,
    writer_path_check,
)
from .errors import ConfigError, DataFormatError, DomainError
from .evaluate import (
    evaluate,
    report_as_dict,
    spearman_rho,
    split_by_scenario,
    sweep_accuracy,
    write_grid_csv,
)
from .features import (
    BLOCKS_PER_SAMPLE,
    extract_features,
    make_triples,
    read_features_csv,
    records_by_id,
    write_features_csv,
)
from .stl import StlParams, stl_decompose

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DOMAIN = 0, 1, 2, 3

# occupancy window of the study scenarios; values outside need --allow-nonpaper
STANDARD_OCCUPANCY_RANGE = (0.08, 0.10)

CLASSIFIER_CHOICES = {"svm": "svm", "logreg": "logistic",
                      "threshold": "threshold"}

_CHANNEL_KEYS = ("n_rays", "rician_k_db", "path_loss_exponent",
                 "ref_distance_m", "shadow_sigma_db", "carrier_freq_hz",
                 "subcarrier_spacing_hz", "delay_spread_s")
_DATASET_KEYS = ("total_blocks", "blocks_per_scenario", "bs_distance_m",
                 "jammer_distances_m", "power_ratios", "snr_good", "snr_bad",
                 "occupancy_fraction", "slot_occupancy", "fft_size")


def _preset(name: str) -> dict:
    base = {**{k: getattr(DatasetSpec, k) for k in _DATASET_KEYS},
            **{k: getattr(ChannelParams, k) for k in _CHANNEL_KEYS}}
    base["jammer_distances_m"] = list(DatasetSpec.jammer_distances_m)
    base["power_ratios"] = list(DatasetSpec.power_ratios)
    if name == "desk":
        return base
    if name == "paper":
        return {**base,
                "total_blocks": FULL_SCALE_TOTAL_BLOCKS,
                "rician_k_db": CALIBRATED_CHANNEL.rician_k_db,
                "delay_spread_s": CALIBRATED_CHANNEL.delay_spread_s}
    raise ConfigError(f"unknown preset {name!r}")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap onto exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def manifest_path(output_path: str) -> str:
    return output_path + ".manifest.json"


def write_manifest(output_path: str, command: str, config: dict, seed,
                   inputs: list[str], outputs: list[str],
                   threads: int = 1) -> None:
    payload = {"command": command,
               "config": config,
               "seed": seed,
               "threads": threads,
               "inputs": inputs,
               "outputs": outputs,
               "version": __version__,
               "timestamp": _utc_now()}
    _atomic_write(manifest_path(output_path),
                  lambda fh: fh.write(json.dumps(payload, indent=2,
                                                 sort_keys=True).encode()))


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        try:
            cfg = json.loads(fh.read().decode())
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"config file {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise DataFormatError("config file must hold a JSON object")
    return cfg


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")


def _resolve_generate_config(args) -> dict:
    config = _preset(args.preset)
    file_cfg = _load_config_file(args.config)
    unknown = set(file_cfg) - set(config)
    if unknown:
        raise ConfigError(f"unknown config file keys: {sorted(unknown)}")
    config.update(file_cfg)
    flag_map = {
        "total_blocks": args.total, "blocks_per_scenario": args.blocks_per_scenario,
        "bs_distance_m": args.bs_distance, "snr_good": args.snr_good,
        "snr_bad": args.snr_bad, "occupancy_fraction": args.occupancy,
        "slot_occupancy": args.slot_occupancy, "fft_size": args.fft_size,
        "n_rays": args.n_rays, "rician_k_db": args.rician_k,
        "path_loss_exponent": args.path_loss_exponent,
        "shadow_sigma_db": args.shadow_sigma,
        "delay_spread_s": args.delay_spread,
    }
    for key, value in flag_map.items():
        if value is not None:
            config[key] = value
    if args.jammer_distances is not None:
        config["jammer_distances_m"] = _csv_floats(args.jammer_distances)
    if args.power_ratios is not None:
        config["power_ratios"] = _csv_floats(args.power_ratios)
    lo, hi = STANDARD_OCCUPANCY_RANGE
    if not args.allow_nonpaper and not lo <= config["occupancy_fraction"] <= hi:
        raise ConfigError(
            f"occupancy_fraction {config['occupancy_fraction']} outside the "
            f"standard window [{lo}, {hi}]; pass --allow-nonpaper to override")
    return config


def _spec_from_config(config: dict) -> DatasetSpec:
    channel = ChannelParams(**{k: config[k] for k in _CHANNEL_KEYS})
    return DatasetSpec(
        channel=channel,
        jammer_distances_m=tuple(config["jammer_distances_m"]),
        power_ratios=tuple(config["power_ratios"]),
        **{k: config[k] for k in _DATASET_KEYS
           if k not in ("jammer_distances_m", "power_ratios")})


def cmd_generate(args) -> int:
    config = _resolve_generate_config(args)
    spec = _spec_from_config(config)
    writer_path_check(args.out)
    _, planned = generate_dataset(spec, args.seed, out_path=args.out)
    outputs = [args.out, sidecar_path(args.out)]
    if args.csv is not None:
        blocks, fft = read_dataset(args.out)
        export_csv(args.csv, blocks, fft)
        outputs.append(args.csv)
        write_manifest(args.csv, "generate", config, args.seed, [], outputs,
                       args.threads)
    write_manifest(args.out, "generate", config, args.seed, [], outputs,
                   args.threads)
    n_scenarios = len(planned)
    print(f"wrote {spec.total_blocks} blocks / {n_scenarios} scenarios "
          f"to {args.out} (seed {args.seed})")
    return EXIT_OK


def _stl_params(args, fft_size: int) -> StlParams:
    kwargs = {"period": args.period if args.period is not None else fft_size}
    for attr, flag in (("seasonal_span", args.seasonal_span),
                       ("trend_span", args.trend_span),
                       ("lowpass_span", args.lowpass_span),
                       ("inner_iterations", args.inner),
                       ("outer_iterations", args.outer)):
        if flag is not None:
            kwargs[attr] = flag
    return StlParams(**kwargs)


def _triple_values(blocks, scenario_id, triple_index) -> np.ndarray:
    run = sorted((b for b in blocks if b.scenario_id == scenario_id),
                 key=lambda b: b.block_index)
    if not run:
        raise DomainError(f"scenario {scenario_id} not present in dataset")
    n_triples = len(run) // BLOCKS_PER_SAMPLE
    if not 0 <= triple_index < n_triples:
        raise DomainError(
            f"triple {triple_index} out of range; scenario {scenario_id} "
            f"holds {n_triples} triple(s)")
    start = triple_index * BLOCKS_PER_SAMPLE
    chunk = run[start:start + BLOCKS_PER_SAMPLE]
    return np.concatenate([b.power_dbm for b in chunk])


def cmd_decompose(args) -> int:
    blocks, fft_size = read_dataset(args.data)
    writer_path_check(args.out)
    values = _triple_values(blocks, args.scenario, args.triple)
    params = _stl_params(args, fft_size)
    decomp = stl_decompose(values, params)

    def writer(fh):
        text = io.TextIOWrapper(fh, encoding="utf-8", newline="")
        text.write("original,trend,seasonal,residual\n")
        for orig, tr, se, re in zip(values, decomp.trend, decomp.seasonal,
                                    decomp.residual):
            text.write(f"{float(orig)!r},{float(tr)!r},"
                       f"{float(se)!r},{float(re)!r}\n")
        text.flush()
        text.detach()

    _atomic_write(args.out, writer)
    write_manifest(args.out, "decompose",
                   {"scenario_id": args.scenario, "triple_index": args.triple,
                    "stl": asdict(params)},
                   None, [args.data], [args.out], args.threads)
    print(f"wrote {values.size} rows to {args.out}")
    return EXIT_OK


def cmd_features(args) -> int:
    blocks, fft_size = read_dataset(args.data)
    records = None
    try:
        records = records_by_id(read_sidecar(sidecar_path(args.data)))
    except FileNotFoundError:
        print("note: no metadata sidecar; feature rows carry no geometry",
              file=sys.stderr)
    params = _stl_params(args, fft_size)
    triples = make_triples(blocks, records)
    rows = extract_features(triples, params)
    write_features_csv(args.out, rows)
    write_manifest(args.out, "features", {"stl": asdict(params)}, None,
                   [args.data], [args.out], args.threads)
    n_jam = sum(1 for r in rows if r.binary_label == 1)
    print(f"wrote {len(rows)} feature rows ({n_jam} jamming) to {args.out}")
    return EXIT_OK


def _fitter_for(name: str, args):
    kind = CLASSIFIER_CHOICES[name]
    base = FITTERS[kind]
    if kind == "logistic":
        return lambda rows: base(rows, lr=args.lr, epochs=args.epochs,
                                 l2=args.l2)
    if kind == "svm":
        return lambda rows: base(rows, c=args.svm_c, epochs=args.epochs)
    return base


def cmd_train(args) -> int:
    rows = read_features_csv(args.features)
    train_rows, test_rows = split_by_scenario(rows, args.test_fraction,
                                              args.seed)
    model = _fitter_for(args.classifier, args)(train_rows)
    save_model(model, args.out)
    config = {"classifier": args.classifier,
              "test_fraction": args.test_fraction,
              "hyper": {"lr": args.lr, "epochs": args.epochs, "l2": args.l2,
                        "c": args.svm_c}}
    write_manifest(args.out, "train", config, args.seed, [args.features],
                   [args.out], args.threads)
    print(f"{args.classifier}: trained on {len(train_rows)} rows "
          f"({len(test_rows)} held out), train accuracy "
          f"{model.training.get('train_accuracy', float('nan')):.4f}")
    return EXIT_OK


def _print_report(report) -> None:
    cm = report.confusion
    print("confusion (rows=true, cols=predicted):")
    print("               pred_normal  pred_jamming")
    print(f"  normal      {cm[0, 0]:11d}  {cm[0, 1]:12d}")
    print(f"  jamming     {cm[1, 0]:11d}  {cm[1, 1]:12d}")
    print(f"accuracy: {report.accuracy:.4f}  ({report.n_samples} samples)")
    for name, stats in report.per_class.items():
        print(f"  {name:8s} precision {stats['precision']:.4f}  "
              f"recall {stats['recall']:.4f}  f1 {stats['f1']:.4f}  "
              f"support {stats['support']}")


def cmd_evaluate(args) -> int:
    rows = read_features_csv(args.features)
    model = load_model(args.model)
    _, test_rows = split_by_scenario(rows, args.test_fraction, args.seed)
    report = evaluate(model, test_rows)
    payload = report_as_dict(report)
    _atomic_write(args.out, lambda fh: fh.write(
        json.dumps(payload, indent=2).encode()))
    write_manifest(args.out, "evaluate",
                   {"test_fraction": args.test_fraction}, args.seed,
                   [args.features, args.model], [args.out], args.threads)
    _print_report(report)
    return EXIT_OK


def _parse_fix(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise ConfigError("--fix expects key=value")
    key = key.strip()
    if key not in ("power_ratio", "jammer_distance_m"):
        raise ConfigError(
            f"--fix key must be power_ratio or jammer_distance_m, got {key!r}")
    try:
        return key, float(value)
    except ValueError:
        raise ConfigError(f"--fix value {value!r} is not a number")


def _write_axis_csv(path: str, header: tuple[str, str],
                    pairs: list[tuple[float, float]]) -> None:
    def writer(fh):
        text = io.TextIOWrapper(fh, encoding="utf-8", newline="")
        text.write(f"{header[0]},{header[1]}\n")
        for key, acc in pairs:
            value = "" if not np.isfinite(acc) else repr(float(acc))
            text.write(f"{key:g},{value}\n")
        text.flush()
        text.detach()
    writer_path_check(path)
    _atomic_write(path, writer)


def cmd_sweep(args) -> int:
    rows = read_features_csv(args.features)
    fitter = _fitter_for(args.classifier, args)
    result = sweep_accuracy(rows, fitter, args.test_fraction, args.seed)
    config = {"classifier": args.classifier,
              "test_fraction": args.test_fraction,
              "fix": args.fix}
    if args.fix is None:
        write_grid_csv(args.out, result)
    else:
        key, value = _parse_fix(args.fix)
        if key == "power_ratio":
            if value not in result.power_ratios:
                raise ConfigError(f"power_ratio {value:g} not in sweep "
                                  f"{result.power_ratios}")
            axis = list(zip(result.jammer_distances_m, result.column(value)))
            _write_axis_csv(args.out, ("jammer_distance_m", "accuracy"), axis)
        else:
            if value not in result.jammer_distances_m:
                raise ConfigError(f"jammer_distance_m {value:g} not in sweep "
                                  f"{result.jammer_distances_m}")
            axis = list(zip(result.power_ratios, result.row(value)))
            _write_axis_csv(args.out, ("power_ratio", "accuracy"), axis)
        rho = spearman_rho([a for _, a in axis])
        print(f"fixed axis {args.fix}: "
              + "  ".join(f"{k:g}:{a:.3f}" for k, a in axis)
              + f"  (spearman {rho:+.3f})")
    write_manifest(args.out, "sweep", config, args.seed, [args.features],
                   [args.out], args.threads)
    print(f"grid over {len(result.jammer_distances_m)} distances x "
          f"{len(result.power_ratios)} power ratios; overall mean accuracy "
          f"{result.overall_mean_accuracy:.4f}")
    return EXIT_OK


def _add_stl_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--period", type=int, default=None,
                   help="cycle length (default: the dataset's fft_size)")
    p.add_argument("--seasonal-span", type=int, default=None)
    p.add_argument("--trend-span", type=int, default=None)
    p.add_argument("--lowpass-span", type=int, default=None)
    p.add_argument("--inner", type=int, default=None,
                   help="inner smoothing passes")
    p.add_argument("--outer", type=int, default=None,
                   help="robustness reweighting passes")


def _add_common(p: argparse.ArgumentParser, seed_default=0) -> None:
    p.add_argument("--seed", type=int, default=seed_default,
                   help="root seed; all randomness derives from it")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap (current pipeline is vectorized "
                        "single-process; recorded in the manifest)")


def _add_classifier_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--classifier", choices=sorted(CLASSIFIER_CHOICES),
                   default="svm")
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--lr", type=float, default=0.5,
                   help="logistic learning rate")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--l2", type=float, default=0.0,
                   help="logistic L2 penalty")
    p.add_argument("--svm-c", type=float, default=1.0,
                   help="SVM soft-margin constant")


def build_parser() -> _Parser:
    parser = _Parser(prog="uavjam",
                     description="Received-power dataset synthesis and "
                                 "decomposition-based jamming detection")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("generate", help="synthesize a labeled dataset")
    g.add_argument("--out", required=True, help="output dataset path")
    g.add_argument("--csv", default=None, help="also export this CSV")
    g.add_argument("--config", default=None, help="JSON config file")
    g.add_argument("--preset", choices=("desk", "paper"), default="desk",
                   help="base defaults: 'desk' small-scale, 'paper' "
                        "full-scale study grid")
    g.add_argument("--total", type=int, default=None)
    g.add_argument("--blocks-per-scenario", type=int, default=None)
    g.add_argument("--bs-distance", type=float, default=None)
    g.add_argument("--jammer-distances", default=None,
                   help="comma-separated meters")
    g.add_argument("--power-ratios", default=None,
                   help="comma-separated jammer/signal power ratios")
    g.add_argument("--snr-good", type=float, default=None)
    g.add_argument("--snr-bad", type=float, default=None)
    g.add_argument("--occupancy", type=float, default=None,
                   help="fraction of bins jammed")
    g.add_argument("--slot-occupancy", type=float, default=None)
    g.add_argument("--fft-size", type=int, default=None)
    g.add_argument("--n-rays", type=int, default=None)
    g.add_argument("--rician-k", type=float, default=None, help="K in dB")
    g.add_argument("--path-loss-exponent", type=float, default=None)
    g.add_argument("--shadow-sigma", type=float, default=None, help="dB")
    g.add_argument("--delay-spread", type=float, default=None, help="seconds")
    g.add_argument("--allow-nonpaper", action="store_true",
                   help="permit occupancy outside the standard window")
    _add_common(g)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("decompose",
                       help="write one triple's decomposition as CSV")
    d.add_argument("--data", required=True)
    d.add_argument("--scenario", type=int, required=True)
    d.add_argument("--triple", type=int, default=0,
                   help="triple index within the scenario")
    d.add_argument("--out", required=True)
    _add_stl_flags(d)
    _add_common(d)
    d.set_defaults(func=cmd_decompose)

    f = sub.add_parser("features",
                       help="extract reconstruction-error features")
    f.add_argument("--data", required=True)
    f.add_argument("--out", required=True)
    _add_stl_flags(f)
    _add_common(f)
    f.set_defaults(func=cmd_features)

    t = sub.add_parser("train", help="fit a detector on the training split")
    t.add_argument("--features", required=True)
    t.add_argument("--out", required=True, help="model JSON path")
    _add_classifier_flags(t)
    _add_common(t)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate",
                       help="score a model on the held-out split")
    e.add_argument("--features", required=True)
    e.add_argument("--model", required=True)
    e.add_argument("--out", required=True, help="report JSON path")
    e.add_argument("--test-fraction", type=float, default=0.3)
    _add_common(e)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep",
                       help="accuracy grid over jammer distance x power")
    s.add_argument("--features", required=True)
    s.add_argument("--out", required=True, help="grid CSV path")
    s.add_argument("--fix", default=None,
                   help="emit one axis, e.g. power_ratio=5")
    _add_classifier_flags(s)
    _add_common(s)
    s.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise ConfigError("--threads must be >= 1")
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
