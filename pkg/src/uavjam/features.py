"""Triple-block samples and the reconstruction-error feature.

Detection works on three consecutive blocks of one scenario concatenated
into a single series whose period equals the block length.  A jammer's
raised band repeats in all three blocks, so the periodic decomposition
explains jammed samples well and leaves a small residual; clean samples
carry no cross-block periodic structure and decompose with a larger
residual.  The scalar feature is the RMS of that residual.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, Sequence

import numpy as np

from .channel import BlockLabel, ResourceBlock
from .dataset import _atomic_write, writer_path_check
from .errors import ConfigError, DegenerateSampleError, DomainError
from .stl import StlParams, reconstruct, reconstruction_rmse, stl_decompose

JAMMING, NORMAL = 1, 0

BLOCKS_PER_SAMPLE = 3


@dataclass
class TripleSample:
    values: np.ndarray
    binary_label: int
    scenario_id: int
    channel_class: BlockLabel
    bs_distance_m: float
    jammer_distance_m: float  # nan when no jammer
    power_ratio: float        # nan when no jammer


@dataclass
class FeatureRow:
    rmse: float
    binary_label: int
    scenario_id: int
    channel_class: BlockLabel
    bs_distance_m: float
    jammer_distance_m: float
    power_ratio: float


def normalize(sample: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; constant input has no scale and is rejected."""
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("sample must be a 1-D vector of length >= 2")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        raise DegenerateSampleError("constant sample has no min-max scale")
    return (x - lo) / (hi - lo)


def records_by_id(records: Iterable[dict]) -> dict[int, dict]:
    return {r["scenario_id"]: r for r in records}


def _metadata_for(scenario_id: int, label: BlockLabel,
                  records: dict[int, dict] | None):
    bs_d = math.nan
    jam_d = math.nan
    ratio = math.nan
    if records is not None and scenario_id in records:
        rec = records[scenario_id]
        bs_d = float(rec.get("bs_distance_m", math.nan))
        jam = rec.get("jammer", {})
        if jam.get("enabled"):
            jam_d = float(jam.get("distance_m", math.nan))
            ratio = float(jam.get("power_ratio", math.nan))
    return bs_d, jam_d, ratio


def make_triples(blocks: Sequence[ResourceBlock],
                 records: dict[int, dict] | None = None) -> list[TripleSample]:
    """Concatenate non-overlapping runs of three consecutive blocks.

    Blocks must arrive grouped by scenario in block order (the generator's
    output order).  Scenarios with fewer than three blocks are skipped with
    a warning; leftover one or two blocks at a run's tail are dropped.
    """
    triples: list[TripleSample] = []
    for scenario_id, group in groupby(blocks, key=lambda b: b.scenario_id):
        run = list(group)
        if len(run) < BLOCKS_PER_SAMPLE:
            warnings.warn(f"scenario {scenario_id} has {len(run)} block(s), "
                          "fewer than one triple; skipped")
            continue
        label = run[0].label
        jam = label in (BlockLabel.GOOD_JAMMING, BlockLabel.BAD_JAMMING)
        bs_d, jam_d, ratio = _metadata_for(scenario_id, label, records)
        for start in range(0, len(run) - BLOCKS_PER_SAMPLE + 1,
                           BLOCKS_PER_SAMPLE):
            chunk = run[start:start + BLOCKS_PER_SAMPLE]
            try:
                values = normalize(np.concatenate([b.power_dbm for b in chunk]))
            except DegenerateSampleError:
                warnings.warn(f"scenario {scenario_id}: constant triple at "
                              f"block {chunk[0].block_index} excluded")
                continue
            triples.append(TripleSample(
                values=values,
                binary_label=JAMMING if jam else NORMAL,
                scenario_id=scenario_id,
                channel_class=label,
                bs_distance_m=bs_d,
                jammer_distance_m=jam_d,
                power_ratio=ratio))
    return triples


def extract_features(triples: Sequence[TripleSample],
                     stl_params: StlParams) -> list[FeatureRow]:
    """Reconstruction-error feature per triple.

    A sample that fails to decompose is skipped with a warning rather than
    aborting the batch.
    """
    rows: list[FeatureRow] = []
    for t in triples:
        if t.values.size != BLOCKS_PER_SAMPLE * stl_params.period:
            raise ConfigError(
                f"sample length {t.values.size} does not equal "
                f"{BLOCKS_PER_SAMPLE} x period {stl_params.period}")
        try:
            decomp = stl_decompose(t.values, stl_params)
            rmse = reconstruction_rmse(reconstruct(decomp), t.values)
        except DomainError as exc:
            warnings.warn(f"scenario {t.scenario_id}: sample skipped ({exc})")
            continue
        rows.append(FeatureRow(
            rmse=rmse, binary_label=t.binary_label,
            scenario_id=t.scenario_id, channel_class=t.channel_class,
            bs_distance_m=t.bs_distance_m,
            jammer_distance_m=t.jammer_distance_m,
            power_ratio=t.power_ratio))
    return rows


_FEATURE_HEADER = ["rmse", "label", "channel_class", "jammer_distance_m",
                   "bs_distance_m", "power_ratio", "scenario_id"]


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def write_features_csv(path: str, rows: Sequence[FeatureRow]) -> None:
    def writer(fh):
        text = io.TextIOWrapper(fh, encoding="utf-8", newline="")
        w = csv.writer(text)
        w.writerow(_FEATURE_HEADER)
        for r in rows:
            w.writerow([repr(float(r.rmse)), r.binary_label,
                        r.channel_class.name, _fmt(r.jammer_distance_m),
                        _fmt(r.bs_distance_m), _fmt(r.power_ratio),
                        r.scenario_id])
        text.flush()
        text.detach()
    writer_path_check(path)
    _atomic_write(path, writer)


def read_features_csv(path: str) -> list[FeatureRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _FEATURE_HEADER:
            from .errors import DataFormatError
            raise DataFormatError(
                f"unexpected feature header {header}, expected {_FEATURE_HEADER}")
        rows = []
        for rec in reader:
            rows.append(FeatureRow(
                rmse=float(rec[0]),
                binary_label=int(rec[1]),
                channel_class=BlockLabel[rec[2]],
                jammer_distance_m=float(rec[3]) if rec[3] else math.nan,
                bs_distance_m=float(rec[4]) if rec[4] else math.nan,
                power_ratio=float(rec[5]) if rec[5] else math.nan,
                scenario_id=int(rec[6])))
    return rows
