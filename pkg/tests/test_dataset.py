"""Dataset planning, generation, and file-format checks."""

import csv
import hashlib

import numpy as np
import pytest

from uavjam.channel import BlockLabel, ResourceBlock
from uavjam.dataset import (
    DatasetSpec,
    class_counts,
    export_csv,
    generate_dataset,
    mean_power_difference,
    plan_scenarios,
    read_dataset,
    read_sidecar,
    sidecar_path,
    write_dataset,
)
from uavjam.errors import ConfigError, DataFormatError, DomainError

DESK = DatasetSpec(total_blocks=48, blocks_per_scenario=12)


def planned_class_totals(planned):
    totals = {label: 0 for label in BlockLabel}
    for p in planned:
        totals[p.config.label] += p.n_blocks
    return totals


def test_plan_balances_classes_exactly():
    planned = plan_scenarios(DatasetSpec(total_blocks=4000), seed=7)
    totals = planned_class_totals(planned)
    assert all(v == 1000 for v in totals.values())


def test_plan_handles_non_divisible_totals():
    planned = plan_scenarios(DatasetSpec(total_blocks=4001), seed=7)
    totals = planned_class_totals(planned)
    assert sum(totals.values()) == 4001
    assert max(totals.values()) - min(totals.values()) <= 1


def test_paper_scale_plan_without_synthesis():
    planned = plan_scenarios(DatasetSpec(total_blocks=483_540), seed=7)
    totals = planned_class_totals(planned)
    for v in totals.values():
        assert abs(v - 120_885) <= 1
    assert all(p.n_blocks >= 3 for p in planned)
    # jamming scenarios cover the full distance x power grid
    cells = {(d["jammer"]["distance_m"], d["jammer"]["power_ratio"])
             for d in (r for r in map(_record, planned) if r["jammer"]["enabled"])}
    assert len(cells) == 25


def _record(p):
    from uavjam.dataset import scenario_record
    return scenario_record(p)


def test_blocks_come_grouped_by_scenario():
    blocks, planned = generate_dataset(DESK, seed=3)
    assert len(blocks) == 48
    pos = 0
    for p in planned:
        run = blocks[pos:pos + p.n_blocks]
        assert all(b.scenario_id == p.config.scenario_id for b in run)
        assert [b.block_index for b in run] == list(range(p.n_blocks))
        pos += p.n_blocks
    assert pos == len(blocks)
    totals = class_counts(blocks)
    assert all(v == 12 for v in totals.values())


def test_generation_is_deterministic(tmp_path):
    p1, p2 = tmp_path / "a.jamd", tmp_path / "b.jamd"
    generate_dataset(DESK, seed=11, out_path=str(p1))
    generate_dataset(DESK, seed=11, out_path=str(p2))
    h1 = hashlib.sha256(p1.read_bytes()).hexdigest()
    h2 = hashlib.sha256(p2.read_bytes()).hexdigest()
    assert h1 == h2
    # a different seed must change the bytes
    generate_dataset(DESK, seed=12, out_path=str(p2))
    assert hashlib.sha256(p2.read_bytes()).hexdigest() != h1


def test_binary_round_trip(tmp_path):
    path = tmp_path / "d.jamd"
    blocks, _ = generate_dataset(DESK, seed=5)
    write_dataset(str(path), blocks, DESK.fft_size, len(blocks))
    loaded, fft_size = read_dataset(str(path))
    assert fft_size == 1024
    assert len(loaded) == len(blocks)
    for got, want in zip(loaded, blocks):
        assert got.label == want.label
        assert got.scenario_id == want.scenario_id
        assert got.block_index == want.block_index
        np.testing.assert_array_equal(
            got.power_dbm, np.asarray(want.power_dbm, dtype=np.float32).astype(np.float64))


def test_reader_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.jamd"
    path.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(DataFormatError, match="magic"):
        read_dataset(str(path))


def test_reader_rejects_wrong_version(tmp_path):
    path = tmp_path / "v9.jamd"
    blocks, _ = generate_dataset(DESK, seed=5)
    write_dataset(str(path), blocks, DESK.fft_size, len(blocks))
    raw = bytearray(path.read_bytes())
    raw[4:6] = (99).to_bytes(2, "little")
    path.write_bytes(bytes(raw))
    with pytest.raises(DataFormatError, match="version"):
        read_dataset(str(path))


def test_reader_rejects_truncation_and_trailing(tmp_path):
    path = tmp_path / "cut.jamd"
    blocks, _ = generate_dataset(DESK, seed=5)
    write_dataset(str(path), blocks, DESK.fft_size, len(blocks))
    raw = path.read_bytes()
    path.write_bytes(raw[:-10])
    with pytest.raises(DataFormatError, match="truncated"):
        read_dataset(str(path))
    path.write_bytes(raw + b"\x00")
    with pytest.raises(DataFormatError, match="trailing"):
        read_dataset(str(path))


def test_csv_export_round_trips_float32(tmp_path):
    path = tmp_path / "d.csv"
    blocks, _ = generate_dataset(DatasetSpec(total_blocks=12,
                                             blocks_per_scenario=3), seed=9)
    export_csv(str(path), blocks, 1024)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:3] == ["label", "scenario_id", "block_index"]
    assert len(rows) == 1 + len(blocks)
    for row, b in zip(rows[1:], blocks):
        assert int(row[0]) == int(b.label)
        assert int(row[1]) == b.scenario_id
        assert int(row[2]) == b.block_index
        parsed = np.array([np.float32(v) for v in row[3:]], dtype=np.float32)
        np.testing.assert_array_equal(
            parsed, np.asarray(b.power_dbm, dtype=np.float32))


def test_sidecar_matches_plan(tmp_path):
    path = tmp_path / "d.jamd"
    _, planned = generate_dataset(DESK, seed=21, out_path=str(path))
    records = read_sidecar(sidecar_path(str(path)))
    assert len(records) == len(planned)
    for rec, p in zip(records, planned):
        assert rec["scenario_id"] == p.config.scenario_id
        assert rec["n_blocks"] == p.n_blocks
        assert rec["class_name"] == p.config.label.name
        assert rec["bs_distance_m"] == pytest.approx(90.0)
        if rec["jammer"]["enabled"]:
            assert rec["jammer"]["power_ratio"] > 0
            assert 0 <= rec["jammer"]["bin_offset"] <= 1024 - 102


def test_spec_validation():
    with pytest.raises(ConfigError):
        DatasetSpec(total_blocks=8)
    with pytest.raises(ConfigError):
        DatasetSpec(blocks_per_scenario=2)
    with pytest.raises(ConfigError):
        DatasetSpec(power_ratios=())
    with pytest.raises(ConfigError):
        DatasetSpec(snr_good=1.0, snr_bad=1.0)


def make_block(label, power, scenario_id=0, block_index=0):
    return ResourceBlock(power_dbm=np.full(8, float(power)), label=label,
                         scenario_id=scenario_id, block_index=block_index)


def test_mean_power_difference_zero_for_identical_populations():
    blocks = [make_block(BlockLabel.GOOD_NORMAL, -10.0),
              make_block(BlockLabel.GOOD_JAMMING, -10.0),
              make_block(BlockLabel.BAD_NORMAL, -3.0),
              make_block(BlockLabel.BAD_JAMMING, -3.0)]
    diff = mean_power_difference(blocks)
    assert diff["good"] == pytest.approx(0.0, abs=1e-12)
    assert diff["bad"] == pytest.approx(0.0, abs=1e-12)


def test_mean_power_difference_reports_shift():
    blocks = [make_block(BlockLabel.GOOD_NORMAL, -10.0),
              make_block(BlockLabel.GOOD_JAMMING, -7.0),
              make_block(BlockLabel.BAD_NORMAL, -3.0),
              make_block(BlockLabel.BAD_JAMMING, -2.5)]
    diff = mean_power_difference(blocks)
    assert diff["good"] == pytest.approx(3.0, abs=1e-9)
    assert diff["bad"] == pytest.approx(0.5, abs=1e-9)


def test_mean_power_difference_requires_all_classes():
    blocks = [make_block(BlockLabel.GOOD_NORMAL, -10.0),
              make_block(BlockLabel.GOOD_JAMMING, -7.0),
              make_block(BlockLabel.BAD_NORMAL, -3.0)]
    with pytest.raises(DomainError):
        mean_power_difference(blocks)
