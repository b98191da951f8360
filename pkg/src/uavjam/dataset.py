"""Dataset planning, generation, and file formats.

A dataset is a sequence of labeled resource blocks grouped into scenario
runs: every block of one scenario shares geometry, jammer settings, and a
jammed-band position, so consecutive blocks form periodic triples.  The
four classes (high/low SNR x jammer on/off) are balanced to within one
block, and the jamming classes sweep a (jammer distance x power ratio)
grid.

On disk a dataset is a little-endian binary file (magic ``JAMD``) plus a
JSON sidecar listing one record per scenario.  A CSV export mirrors the
binary content row for row at float32 precision.
"""

from __future__ import annotations

import csv
import json
import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .channel import (
    BlockLabel,
    ChannelParams,
    JammerConfig,
    Position3D,
    ResourceBlock,
    ScenarioConfig,
    channel_class,
    distance_m,
    synthesize_block,
)
from .errors import ConfigError, DataFormatError, DomainError
from .seeding import block_rng, scenario_rng

MAGIC = b"JAMD"
FORMAT_VERSION = 1

# Block count of the full-scale study dataset (the `paper` CLI preset).
FULL_SCALE_TOTAL_BLOCKS = 483_540
_HEADER = struct.Struct("<4sHIQ")
_BLOCK_META = struct.Struct("<BII")


@dataclass(frozen=True)
class DatasetSpec:
    """Knobs for one generated dataset.

    The two normal classes reuse the serving-link geometry; the two jamming
    classes spread their block budget over every (jammer distance, power
    ratio) grid cell.
    """

    total_blocks: int = 4000
    blocks_per_scenario: int = 12
    bs_distance_m: float = 90.0
    jammer_distances_m: tuple[float, ...] = (10.0, 30.0, 90.0, 200.0, 350.0)
    power_ratios: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0)
    snr_good: float = 20.0
    snr_bad: float = 1.0
    occupancy_fraction: float = 102 / 1024
    slot_occupancy: float = 1.0
    fft_size: int = 1024
    channel: ChannelParams = field(default_factory=ChannelParams)

    def __post_init__(self):
        if self.blocks_per_scenario < 3:
            raise ConfigError("blocks_per_scenario must be >= 3 so triples exist")
        if self.total_blocks < 4 * 3:
            raise ConfigError("total_blocks must cover >= 3 blocks per class")
        if self.bs_distance_m <= 0:
            raise ConfigError("bs_distance_m must be positive")
        if not self.jammer_distances_m or any(d <= 0 for d in self.jammer_distances_m):
            raise ConfigError("jammer_distances_m must be positive and non-empty")
        if not self.power_ratios or any(r <= 0 for r in self.power_ratios):
            raise ConfigError("power_ratios must be positive and non-empty")
        if self.snr_good <= self.snr_bad:
            raise ConfigError("snr_good must exceed snr_bad")


@dataclass
class PlannedScenario:
    config: ScenarioConfig
    n_blocks: int


def _class_budgets(total: int) -> list[int]:
    base, extra = divmod(total, 4)
    return [base + (1 if i < extra else 0) for i in range(4)]


def _scenario_run_lengths(budget: int, per_scenario: int) -> list[int]:
    """Split a class budget into scenario run lengths, each >= 3."""
    if budget < 3:
        raise ConfigError(f"class budget {budget} cannot hold one triple")
    n_full = budget // per_scenario
    rest = budget - n_full * per_scenario
    if n_full == 0:
        return [budget]
    lengths = [per_scenario] * n_full
    lengths[-1] += rest  # keep the remainder attached to a full run
    return lengths


def plan_scenarios(spec: DatasetSpec, seed: int) -> list[PlannedScenario]:
    """Deterministic scenario plan with exact class balance.

    Jamming scenarios are dealt round-robin over the distance x power grid;
    each scenario's jammed-band offset comes from its own seeded stream.
    """
    uav = Position3D(0.0, 0.0, spec.bs_distance_m)
    bs = Position3D(0.0, 0.0, 0.0)
    budgets = _class_budgets(spec.total_blocks)
    jam_cells = [(d, r) for d in spec.jammer_distances_m
                 for r in spec.power_ratios]
    n_jam_bins = math.ceil(spec.occupancy_fraction * spec.fft_size)
    planned: list[PlannedScenario] = []
    scenario_id = 0
    for label in (BlockLabel.GOOD_NORMAL, BlockLabel.BAD_NORMAL,
                  BlockLabel.GOOD_JAMMING, BlockLabel.BAD_JAMMING):
        snr = spec.snr_good if label in (BlockLabel.GOOD_NORMAL,
                                         BlockLabel.GOOD_JAMMING) else spec.snr_bad
        jammed = label in (BlockLabel.GOOD_JAMMING, BlockLabel.BAD_JAMMING)
        for k, run in enumerate(_scenario_run_lengths(budgets[label],
                                                      spec.blocks_per_scenario)):
            if jammed:
                d_jam, ratio = jam_cells[k % len(jam_cells)]
                offset = int(scenario_rng(seed, scenario_id).integers(
                    0, spec.fft_size - n_jam_bins + 1))
                jammer = JammerConfig(
                    enabled=True,
                    position=Position3D(d_jam, 0.0, spec.bs_distance_m),
                    power_ratio=ratio,
                    occupancy_fraction=spec.occupancy_fraction,
                    slot_occupancy=spec.slot_occupancy,
                    bin_offset=offset)
            else:
                jammer = JammerConfig(enabled=False)
            config = ScenarioConfig(
                uav_pos=uav, bs_pos=bs, snr_linear=snr, jammer=jammer,
                channel=spec.channel, fft_size=spec.fft_size, seed=seed,
                scenario_id=scenario_id)
            planned.append(PlannedScenario(config=config, n_blocks=run))
            scenario_id += 1
    return planned


def iter_blocks(planned: Sequence[PlannedScenario], seed: int) -> Iterator[ResourceBlock]:
    for p in planned:
        for i in range(p.n_blocks):
            rng = block_rng(seed, p.config.scenario_id, i)
            yield synthesize_block(p.config, rng, block_index=i)


def scenario_record(p: PlannedScenario) -> dict:
    c = p.config
    rec = {
        "scenario_id": c.scenario_id,
        "label": int(c.label),
        "class_name": c.label.name,
        "snr_linear": c.snr_linear,
        "uav_pos": [c.uav_pos.x, c.uav_pos.y, c.uav_pos.z],
        "bs_pos": [c.bs_pos.x, c.bs_pos.y, c.bs_pos.z],
        "bs_distance_m": distance_m(c.uav_pos, c.bs_pos),
        "n_blocks": p.n_blocks,
        "seed": c.seed,
        "fft_size": c.fft_size,
        "channel": {
            "n_rays": c.channel.n_rays,
            "rician_k_db": c.channel.rician_k_db,
            "path_loss_exponent": c.channel.path_loss_exponent,
            "ref_distance_m": c.channel.ref_distance_m,
            "shadow_sigma_db": c.channel.shadow_sigma_db,
            "carrier_freq_hz": c.channel.carrier_freq_hz,
            "subcarrier_spacing_hz": c.channel.subcarrier_spacing_hz,
            "delay_spread_s": c.channel.delay_spread_s,
        },
        "jammer": {"enabled": c.jammer.enabled},
    }
    if c.jammer.enabled:
        rec["jammer"].update({
            "position": [c.jammer.position.x, c.jammer.position.y,
                         c.jammer.position.z],
            "distance_m": distance_m(c.uav_pos, c.jammer.position),
            "power_ratio": c.jammer.power_ratio,
            "occupancy_fraction": c.jammer.occupancy_fraction,
            "slot_occupancy": c.jammer.slot_occupancy,
            "bin_offset": c.jammer.bin_offset,
        })
    return rec


def _atomic_write(path: str, writer) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_dataset(path: str, blocks: Iterable[ResourceBlock], fft_size: int,
                  count: int) -> None:
    """Serialize blocks to the binary format (atomically)."""
    def writer(fh):
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, fft_size, count))
        written = 0
        for b in blocks:
            if b.power_dbm.size != fft_size:
                raise DataFormatError(
                    f"block has {b.power_dbm.size} bins, expected {fft_size}")
            fh.write(_BLOCK_META.pack(int(b.label), b.scenario_id, b.block_index))
            fh.write(np.asarray(b.power_dbm, dtype="<f4").tobytes())
            written += 1
        if written != count:
            raise DataFormatError(f"wrote {written} blocks, expected {count}")
    writer_path_check(path)
    _atomic_write(path, writer)


def writer_path_check(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise DataFormatError(f"output directory does not exist: {directory}")


def write_sidecar(path: str, planned: Sequence[PlannedScenario]) -> None:
    records = [scenario_record(p) for p in planned]
    _atomic_write(path, lambda fh: fh.write(
        json.dumps(records, indent=2).encode()))


def sidecar_path(dataset_path: str) -> str:
    return dataset_path + ".meta.json"


def read_sidecar(path: str) -> list[dict]:
    with open(path, "rb") as fh:
        records = json.loads(fh.read().decode())
    if not isinstance(records, list):
        raise DataFormatError("metadata sidecar must be a JSON array")
    return records


def generate_dataset(spec: DatasetSpec, seed: int, out_path: str | None = None):
    """Plan and synthesize a dataset.

    With ``out_path`` the blocks stream straight to disk (binary file plus
    JSON sidecar) and the returned list of blocks is empty; without it all
    blocks are returned in memory.  Returns (blocks, planned scenarios).
    """
    planned = plan_scenarios(spec, seed)
    if out_path is None:
        return list(iter_blocks(planned, seed)), planned
    write_dataset(out_path, iter_blocks(planned, seed), spec.fft_size,
                  spec.total_blocks)
    write_sidecar(sidecar_path(out_path), planned)
    return [], planned


def read_dataset(path: str) -> tuple[list[ResourceBlock], int]:
    """Read a binary dataset; returns (blocks, fft_size)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise DataFormatError("file too short for header")
        magic, version, fft_size, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise DataFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise DataFormatError(
                f"format version {version}, expected {FORMAT_VERSION}")
        blocks = []
        row_bytes = _BLOCK_META.size + 4 * fft_size
        for i in range(count):
            row = fh.read(row_bytes)
            if len(row) < row_bytes:
                raise DataFormatError(f"truncated at block {i} of {count}")
            label, scenario_id, block_index = _BLOCK_META.unpack_from(row)
            if label > 3:
                raise DataFormatError(f"label byte {label} out of range")
            power = np.frombuffer(row, dtype="<f4", count=fft_size,
                                  offset=_BLOCK_META.size).astype(np.float64)
            blocks.append(ResourceBlock(
                power_dbm=power, label=BlockLabel(label),
                scenario_id=scenario_id, block_index=block_index))
        if fh.read(1):
            raise DataFormatError("trailing bytes after final block")
    return blocks, fft_size


def export_csv(path: str, blocks: Iterable[ResourceBlock], fft_size: int) -> None:
    """One row per block: label, scenario_id, block_index, per-bin values.

    Values are written as the shortest decimal strings that parse back to
    the exact float32 stored in the binary format.
    """
    def writer(fh):
        import io
        text = io.TextIOWrapper(fh, encoding="utf-8", newline="")
        w = csv.writer(text)
        w.writerow(["label", "scenario_id", "block_index"]
                   + [f"bin_{i}" for i in range(fft_size)])
        for b in blocks:
            values = np.asarray(b.power_dbm, dtype=np.float32)
            w.writerow([int(b.label), b.scenario_id, b.block_index]
                       + [np.format_float_positional(v, unique=True, trim="0")
                          for v in values])
        text.flush()
        text.detach()
    writer_path_check(path)
    _atomic_write(path, writer)


def class_counts(blocks: Iterable[ResourceBlock]) -> dict[BlockLabel, int]:
    counts = {label: 0 for label in BlockLabel}
    for b in blocks:
        counts[b.label] += 1
    return counts


def block_power_dbm(block: ResourceBlock) -> float:
    """Whole-block received power: mean linear power over bins, in dBm."""
    return float(10.0 * np.log10(np.mean(10.0 ** (block.power_dbm / 10.0))))


def mean_power_difference(blocks: Sequence[ResourceBlock]) -> dict[str, float]:
    """Mean block power with jamming minus without, per SNR class, in dBm."""
    sums = {label: [0.0, 0] for label in BlockLabel}
    for b in blocks:
        sums[b.label][0] += block_power_dbm(b)
        sums[b.label][1] += 1
    def mean(label):
        total, n = sums[label]
        if n == 0:
            raise DomainError(f"no blocks with label {label.name}")
        return total / n
    return {
        "good": mean(BlockLabel.GOOD_JAMMING) - mean(BlockLabel.GOOD_NORMAL),
        "bad": mean(BlockLabel.BAD_JAMMING) - mean(BlockLabel.BAD_NORMAL),
    }
