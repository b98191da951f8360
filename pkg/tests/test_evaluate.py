"""Confusion metrics, scenario-level splits, and the accuracy sweep grid."""

import json
import math

import numpy as np
import pytest

from uavjam.channel import BlockLabel
from uavjam.classify import ClassifierModel, KIND_THRESHOLD, fit_threshold
from uavjam.errors import ConfigError
from uavjam.evaluate import (
    confusion_matrix,
    evaluate,
    report_as_dict,
    spearman_rho,
    split_by_scenario,
    sweep_accuracy,
    write_grid_csv,
)
from uavjam.features import FeatureRow


def frow(rmse, label, scenario_id, cls=BlockLabel.GOOD_NORMAL,
         jam_d=math.nan, ratio=math.nan):
    return FeatureRow(rmse=rmse, binary_label=label, scenario_id=scenario_id,
                      channel_class=cls, bs_distance_m=90.0,
                      jammer_distance_m=jam_d, power_ratio=ratio)


def above(threshold):
    return ClassifierModel(kind=KIND_THRESHOLD,
                           params={"threshold": threshold, "direction": 1})


# ----------------------------------------------------------------- metrics

def test_confusion_counts():
    cm = confusion_matrix([0, 0, 1, 1, 1], [0, 1, 1, 1, 0])
    np.testing.assert_array_equal(cm, [[1, 1], [1, 2]])


def test_evaluate_report_numbers():
    rows = ([frow(0.1, 0, i) for i in range(9)]      # true normal, pred normal
            + [frow(0.7, 0, 9)]                      # true normal, pred jam
            + [frow(0.3, 1, 10 + i) for i in range(2)]   # true jam, pred normal
            + [frow(0.9, 1, 12 + i) for i in range(8)])  # true jam, pred jam
    report = evaluate(above(0.5), rows)
    np.testing.assert_array_equal(report.confusion, [[9, 1], [2, 8]])
    assert report.accuracy == pytest.approx(0.85)
    assert report.accuracy == pytest.approx(
        np.trace(report.confusion) / report.confusion.sum())
    jam = report.per_class["jamming"]
    assert jam["precision"] == pytest.approx(8 / 9)
    assert jam["recall"] == pytest.approx(0.8)
    assert jam["f1"] == pytest.approx(2 * (8 / 9) * 0.8 / (8 / 9 + 0.8))
    assert jam["support"] == 10
    assert report.per_class["normal"]["recall"] == pytest.approx(0.9)
    assert report.n_samples == 20
    json.dumps(report_as_dict(report))  # must be JSON-serializable


def test_evaluate_perfect_and_degenerate():
    rows = [frow(0.1, 0, 0), frow(0.9, 1, 1)]
    assert evaluate(above(0.5), rows).accuracy == 1.0
    # a model that shouts "jamming" at everything scores chance on balance
    always_jam = above(-math.inf)
    report = evaluate(always_jam, rows * 5)
    assert report.accuracy == 0.5
    assert report.per_class["normal"]["precision"] == 0.0
    assert report.per_class["normal"]["recall"] == 0.0


def test_evaluate_empty_rejected():
    with pytest.raises(ConfigError):
        evaluate(above(0.5), [])


# ------------------------------------------------------------------- split

def scenario_rows(n_scenarios, rows_each=4):
    out = []
    for sid in range(n_scenarios):
        out += [frow(0.5, 0, sid) for _ in range(rows_each)]
    return out


def test_split_keeps_scenarios_whole():
    rows = scenario_rows(10)
    train, test = split_by_scenario(rows, test_fraction=0.3, seed=4)
    train_ids = {r.scenario_id for r in train}
    test_ids = {r.scenario_id for r in test}
    assert not train_ids & test_ids
    assert train_ids | test_ids == set(range(10))
    assert len(test_ids) == 3
    assert len(test) == 3 * 4  # whole scenarios moved, not single rows


def test_split_is_deterministic_per_seed():
    rows = scenario_rows(12)
    first = split_by_scenario(rows, seed=9)
    second = split_by_scenario(rows, seed=9)
    assert ({r.scenario_id for r in first[1]}
            == {r.scenario_id for r in second[1]})


def test_split_stratifies_by_cell():
    rows = (scenario_rows(5)
            + [frow(0.1, 1, 100 + sid, cls=BlockLabel.GOOD_JAMMING,
                    jam_d=30.0, ratio=5.0)
               for sid in range(5) for _ in range(2)])
    _, test = split_by_scenario(rows, test_fraction=0.3, seed=0)
    test_ids = {r.scenario_id for r in test}
    # round(0.3 * 5) = 2 scenarios from each stratum
    assert len([i for i in test_ids if i < 100]) == 2
    assert len([i for i in test_ids if i >= 100]) == 2


def test_split_small_strata_keep_a_train_scenario():
    rows = [frow(0.5, 0, 0), frow(0.5, 0, 1)]
    train, test = split_by_scenario(rows, test_fraction=0.5, seed=1)
    assert len({r.scenario_id for r in train}) == 1
    assert len({r.scenario_id for r in test}) == 1
    lone = [frow(0.5, 0, 7)]
    train, test = split_by_scenario(lone, test_fraction=0.5, seed=1)
    assert test == [] and len(train) == 1


def test_split_fraction_validated():
    rows = scenario_rows(4)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ConfigError):
            split_by_scenario(rows, test_fraction=bad)


# ------------------------------------------------------------------- sweep

def grid_rows(skip_cell=None):
    rows = []
    sid = 0
    for _ in range(4):  # shared normal pool
        rows += [frow(0.9 + 0.001 * sid, 0, sid) for _ in range(3)]
        sid += 1
    for d in (10.0, 30.0):
        for p in (2.0, 5.0):
            if skip_cell == (d, p):
                continue
            for _ in range(3):
                rows += [frow(0.1 + 0.001 * sid, 1, sid,
                              cls=BlockLabel.GOOD_JAMMING, jam_d=d, ratio=p)
                         for _ in range(2)]
                sid += 1
    return rows


def test_sweep_separable_grid_is_perfect():
    result = sweep_accuracy(grid_rows(), fit_threshold, seed=3)
    assert result.jammer_distances_m == [10.0, 30.0]
    assert result.power_ratios == [2.0, 5.0]
    np.testing.assert_allclose(result.accuracy, 1.0)
    assert result.overall_mean_accuracy == 1.0
    assert np.all(result.test_counts > 0)
    np.testing.assert_allclose(result.column(5.0), [1.0, 1.0])
    np.testing.assert_allclose(result.row(30.0), [1.0, 1.0])


def test_sweep_missing_cell_stays_nan():
    result = sweep_accuracy(grid_rows(skip_cell=(30.0, 5.0)), fit_threshold,
                            seed=3)
    i = result.jammer_distances_m.index(30.0)
    j = result.power_ratios.index(5.0)
    assert math.isnan(result.accuracy[i, j])
    assert result.test_counts[i, j] == 0
    assert result.overall_mean_accuracy == 1.0  # mean over present cells


def test_sweep_requires_jammed_rows():
    with pytest.raises(ConfigError):
        sweep_accuracy(scenario_rows(4), fit_threshold)


def test_grid_csv_layout(tmp_path):
    result = sweep_accuracy(grid_rows(skip_cell=(30.0, 5.0)), fit_threshold,
                            seed=3)
    path = tmp_path / "grid.csv"
    write_grid_csv(str(path), result)
    lines = path.read_text().splitlines()
    assert lines[0] == "jammer_distance_m,power_ratio_2,power_ratio_5"
    assert lines[1].startswith("10,")
    assert lines[2].split(",")[2] == ""  # missing cell stays empty
    assert float(lines[1].split(",")[1]) == 1.0


# ---------------------------------------------------------------- spearman

def test_spearman_extremes():
    assert spearman_rho([5.0, 4.0, 3.0, 2.0, 1.0]) == pytest.approx(-1.0)
    assert spearman_rho([1.0, 2.0, 3.0, 4.0, 5.0]) == pytest.approx(1.0)


def test_spearman_skips_missing():
    assert spearman_rho([1.0, math.nan, 3.0]) == pytest.approx(1.0)
    assert math.isnan(spearman_rho([math.nan, 2.0]))
