"""Triple assembly, normalization, and the reconstruction-error feature."""

import math

import numpy as np
import pytest

from uavjam.channel import BlockLabel, ResourceBlock
from uavjam.errors import ConfigError, DegenerateSampleError, DomainError
from uavjam.features import (
    FeatureRow,
    extract_features,
    make_triples,
    normalize,
    read_features_csv,
    records_by_id,
    write_features_csv,
)
from uavjam.stl import StlParams


def blocks_for(scenario_id, n_blocks, label=BlockLabel.GOOD_NORMAL, n_bins=32,
               seed=0):
    rng = np.random.default_rng([seed, scenario_id])
    return [ResourceBlock(power_dbm=rng.normal(size=n_bins), label=label,
                          scenario_id=scenario_id, block_index=i)
            for i in range(n_blocks)]


# ------------------------------------------------------------- normalize

def test_normalize_basic():
    np.testing.assert_allclose(normalize(np.array([2.0, 4.0, 6.0])),
                               [0.0, 0.5, 1.0])


def test_normalize_identity_when_already_unit_range():
    x = np.array([0.0, 0.25, 0.7, 1.0])
    np.testing.assert_allclose(normalize(x), x)


def test_normalize_rejects_degenerate_and_invalid():
    with pytest.raises(DegenerateSampleError):
        normalize(np.array([5.0, 5.0, 5.0]))
    with pytest.raises(DomainError):
        normalize(np.array([1.0, math.nan]))
    with pytest.raises(DomainError):
        normalize(np.array([1.0]))


# ------------------------------------------------------------ make_triples

def test_nine_blocks_make_three_triples():
    triples = make_triples(blocks_for(0, 9))
    assert len(triples) == 3
    assert all(t.values.size == 3 * 32 for t in triples)
    assert all(t.binary_label == 0 for t in triples)


def test_leftover_blocks_dropped():
    assert len(make_triples(blocks_for(0, 8))) == 2


def test_no_cross_scenario_mixing():
    blocks = blocks_for(0, 3) + blocks_for(1, 3, label=BlockLabel.GOOD_JAMMING)
    triples = make_triples(blocks)
    assert len(triples) == 2
    assert triples[0].scenario_id == 0 and triples[0].binary_label == 0
    assert triples[1].scenario_id == 1 and triples[1].binary_label == 1


def test_short_scenario_skipped_with_warning():
    blocks = blocks_for(0, 2) + blocks_for(1, 3)
    with pytest.warns(UserWarning, match="fewer than one triple"):
        triples = make_triples(blocks)
    assert [t.scenario_id for t in triples] == [1]


def test_constant_triple_excluded_with_warning():
    flat = [ResourceBlock(power_dbm=np.zeros(16), label=BlockLabel.GOOD_NORMAL,
                          scenario_id=0, block_index=i) for i in range(3)]
    with pytest.warns(UserWarning, match="constant triple"):
        assert make_triples(flat) == []


def test_metadata_propagation():
    records = records_by_id([{
        "scenario_id": 5, "bs_distance_m": 90.0,
        "jammer": {"enabled": True, "distance_m": 30.0, "power_ratio": 5.0},
    }])
    triples = make_triples(blocks_for(5, 3, label=BlockLabel.BAD_JAMMING),
                           records)
    t = triples[0]
    assert t.bs_distance_m == 90.0
    assert t.jammer_distance_m == 30.0
    assert t.power_ratio == 5.0
    assert t.channel_class is BlockLabel.BAD_JAMMING
    # without records the metadata stays undefined
    t2 = make_triples(blocks_for(5, 3))[0]
    assert math.isnan(t2.jammer_distance_m) and math.isnan(t2.bs_distance_m)


# -------------------------------------------------------- extract_features

def make_triple(values, label=0, scenario_id=0):
    from uavjam.features import TripleSample
    return TripleSample(values=np.asarray(values, dtype=float),
                        binary_label=label, scenario_id=scenario_id,
                        channel_class=BlockLabel.GOOD_NORMAL,
                        bs_distance_m=90.0, jammer_distance_m=math.nan,
                        power_ratio=math.nan)


def test_exactly_periodic_triple_has_tiny_rmse():
    rng = np.random.default_rng(3)
    period = 64
    pattern = normalize(rng.normal(size=period))
    triple = make_triple(np.tile(pattern, 3))
    rows = extract_features([triple], StlParams(period=period))
    assert len(rows) == 1
    assert rows[0].rmse < 1e-6


def test_white_noise_scores_higher_than_periodic():
    rng = np.random.default_rng(11)
    period = 64
    pattern = normalize(rng.normal(size=period))
    periodic = make_triple(np.tile(pattern, 3), scenario_id=0)
    noise = make_triple(normalize(rng.normal(size=3 * period)), scenario_id=1)
    rows = extract_features([periodic, noise], StlParams(period=period))
    assert rows[0].rmse < rows[1].rmse


def test_period_mismatch_rejected():
    triple = make_triple(np.linspace(0, 1, 96))
    with pytest.raises(ConfigError):
        extract_features([triple], StlParams(period=64))


# ------------------------------------------------------------- CSV round trip

def test_feature_csv_round_trip(tmp_path):
    rows = [
        FeatureRow(rmse=0.123456789, binary_label=1, scenario_id=4,
                   channel_class=BlockLabel.GOOD_JAMMING, bs_distance_m=90.0,
                   jammer_distance_m=30.0, power_ratio=5.0),
        FeatureRow(rmse=0.9, binary_label=0, scenario_id=2,
                   channel_class=BlockLabel.BAD_NORMAL, bs_distance_m=90.0,
                   jammer_distance_m=math.nan, power_ratio=math.nan),
    ]
    path = tmp_path / "features.csv"
    write_features_csv(str(path), rows)
    header = path.read_text().splitlines()[0]
    assert header == ("rmse,label,channel_class,jammer_distance_m,"
                      "bs_distance_m,power_ratio,scenario_id")
    back = read_features_csv(str(path))
    assert len(back) == 2
    for a, b in zip(back, rows):
        assert a.rmse == b.rmse
        assert a.binary_label == b.binary_label
        assert a.scenario_id == b.scenario_id
        assert a.channel_class == b.channel_class
        assert (a.jammer_distance_m == b.jammer_distance_m
                or (math.isnan(a.jammer_distance_m)
                    and math.isnan(b.jammer_distance_m)))
