"""Loader tests against files produced by the real generator CLI."""

import shutil
import struct
import subprocess

import numpy as np
import pytest

from jamnet import (
    DatasetFormatError,
    kfold_indices,
    load_binary,
    load_csv,
    load_dataset,
    normalize_minmax,
    split_train_test,
)

TOTAL = 240


@pytest.fixture(scope="session")
def dataset_files(tmp_path_factory):
    """Small binary+CSV pair written by the generator's public CLI."""
    root = tmp_path_factory.mktemp("data")
    binary = root / "small.jamd"
    csv = root / "small.csv"
    subprocess.run(
        [
            "uavjam",
            "generate",
            "--total",
            str(TOTAL),
            "--seed",
            "5",
            "--out",
            str(binary),
            "--csv",
            str(csv),
        ],
        check=True,
        capture_output=True,
        text=True,
    )
    return binary, csv


def test_binary_shapes_and_labels(dataset_files):
    binary, _ = dataset_files
    x, y = load_binary(str(binary))
    assert x.shape == (TOTAL, 1024)
    assert x.dtype == np.float32
    assert y.shape == (TOTAL,)
    assert set(np.unique(y)) <= {0, 1, 2, 3}


def test_label_histogram_balanced(dataset_files):
    binary, _ = dataset_files
    _, y = load_binary(str(binary))
    counts = np.bincount(y, minlength=4)
    assert counts.max() - counts.min() <= 1


def test_csv_and_binary_loaders_agree_elementwise(dataset_files):
    binary, csv = dataset_files
    xb, yb = load_binary(str(binary))
    xc, yc = load_csv(str(csv))
    assert np.array_equal(yb, yc)
    assert np.array_equal(xb, xc)


def test_load_dataset_sniffs_format_and_normalizes(dataset_files):
    binary, csv = dataset_files
    xb, yb = load_dataset(str(binary))
    xc, yc = load_dataset(str(csv))
    assert np.array_equal(xb, xc)
    assert np.array_equal(yb, yc)
    # Default output is per-sample min-max normalized.
    assert xb.min() >= 0.0 and xb.max() <= 1.0
    assert np.allclose(xb.min(axis=1), 0.0)
    assert np.allclose(xb.max(axis=1), 1.0)
    # Raw mode returns the stored dB values unchanged.
    raw, _ = load_dataset(str(binary), normalize=False)
    assert np.array_equal(raw, load_binary(str(binary))[0])


def test_normalize_minmax_constant_rows_become_zero():
    x = np.array([[3.0, 3.0, 3.0], [1.0, 2.0, 3.0]], dtype=np.float32)
    out = normalize_minmax(x)
    assert np.array_equal(out[0], np.zeros(3, dtype=np.float32))
    assert np.allclose(out[1], [0.0, 0.5, 1.0])


def test_bad_magic_rejected(dataset_files, tmp_path):
    binary, _ = dataset_files
    bad = tmp_path / "bad_magic.jamd"
    data = bytearray(binary.read_bytes())
    data[:4] = b"NOPE"
    bad.write_bytes(bytes(data))
    with pytest.raises(DatasetFormatError, match="magic"):
        load_binary(str(bad))


def test_unsupported_version_rejected(dataset_files, tmp_path):
    binary, _ = dataset_files
    bad = tmp_path / "bad_version.jamd"
    data = bytearray(binary.read_bytes())
    data[4:6] = struct.pack("<H", 9)
    bad.write_bytes(bytes(data))
    with pytest.raises(DatasetFormatError, match="version"):
        load_binary(str(bad))


def test_truncated_and_padded_files_rejected(dataset_files, tmp_path):
    binary, _ = dataset_files
    data = binary.read_bytes()
    short = tmp_path / "short.jamd"
    short.write_bytes(data[:-100])
    with pytest.raises(DatasetFormatError, match="truncated"):
        load_binary(str(short))
    padded = tmp_path / "padded.jamd"
    padded.write_bytes(data + b"\x00" * 7)
    with pytest.raises(DatasetFormatError, match="trailing"):
        load_binary(str(padded))


def test_csv_header_mismatch_rejected(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("foo,bar,baz\n1,2,3\n")
    with pytest.raises(DatasetFormatError, match="header"):
        load_csv(str(bad))


def test_split_train_test_is_seeded_and_disjoint(dataset_files):
    binary, _ = dataset_files
    x, y = load_dataset(str(binary))
    xa, ya, xb_, yb_ = split_train_test(x, y, test_fraction=0.3, seed=4)
    assert len(ya) + len(yb_) == TOTAL
    assert len(yb_) == round(TOTAL * 0.3)
    xa2, ya2, _, _ = split_train_test(x, y, test_fraction=0.3, seed=4)
    assert np.array_equal(xa, xa2) and np.array_equal(ya, ya2)
    xa3, _, _, _ = split_train_test(x, y, test_fraction=0.3, seed=5)
    assert not np.array_equal(xa, xa3)
    with pytest.raises(ValueError):
        split_train_test(x, y, test_fraction=1.5)


def test_kfold_indices_partition():
    folds = kfold_indices(103, 5, seed=2)
    assert len(folds) == 5
    all_val = np.concatenate([val for _, val in folds])
    assert sorted(all_val.tolist()) == list(range(103))
    for train, val in folds:
        assert len(set(train) & set(val)) == 0
        assert len(train) + len(val) == 103
    with pytest.raises(ValueError):
        kfold_indices(10, 1)


def test_generator_cli_available():
    assert shutil.which("uavjam"), "generator CLI must be on PATH for these tests"
