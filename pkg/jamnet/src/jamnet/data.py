"""Dataset loading for spectrum-block classification.

This module reads the two on-disk dataset formats produced by the ``uavjam``
generator and turns them into arrays ready for model training:

* the binary ``.jamd`` container — a little-endian header ``(magic, version,
  fft_size, count)`` followed by one record per block: ``(label u8,
  scenario_id u32, block_index u32)`` and ``fft_size`` float32 power values
  in dB;
* the CSV export — a header row ``label,scenario_id,block_index,bin_0,...``
  followed by one row per block.

The readers here are written against the published byte/column layout only,
so this package stays decoupled from the generator's internals.  Both
loaders return the same ``(features, labels)`` pair and a round-trip through
either format yields identical float32 feature matrices.

Labels are the four channel/interference classes::

    0 = good channel, no jamming      2 = good channel, jamming
    1 = bad channel,  no jamming      3 = bad channel,  jamming
"""

from __future__ import annotations

import csv

import numpy as np

MAGIC = b"JAMD"
SUPPORTED_VERSION = 1
_HEADER_BYTES = 4 + 2 + 4 + 8  # magic, version u16, fft_size u32, count u64

CLASS_NAMES = ("good_normal", "bad_normal", "good_jamming", "bad_jamming")
NUM_CLASSES = len(CLASS_NAMES)


class DatasetFormatError(IOError):
    """Raised when a dataset file does not match the documented layout."""


def _record_dtype(fft_size: int) -> np.dtype:
    return np.dtype(
        [
            ("label", "u1"),
            ("scenario_id", "<u4"),
            ("block_index", "<u4"),
            ("power_db", "<f4", (fft_size,)),
        ]
    )


def load_binary(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``.jamd`` file; return ``(features, labels)``.

    ``features`` is float32 with shape ``(count, fft_size)`` (power in dB,
    unnormalized); ``labels`` is int64 with shape ``(count,)``.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER_BYTES:
        raise DatasetFormatError(f"{path}: file too short for header")
    magic = raw[:4]
    if magic != MAGIC:
        raise DatasetFormatError(f"{path}: bad magic {magic!r}")
    version = int.from_bytes(raw[4:6], "little")
    if version != SUPPORTED_VERSION:
        raise DatasetFormatError(f"{path}: unsupported format version {version}")
    fft_size = int.from_bytes(raw[6:10], "little")
    count = int.from_bytes(raw[10:18], "little")
    if fft_size == 0:
        raise DatasetFormatError(f"{path}: zero fft_size")
    record = _record_dtype(fft_size)
    body = raw[_HEADER_BYTES:]
    expected = count * record.itemsize
    if len(body) < expected:
        raise DatasetFormatError(
            f"{path}: truncated body ({len(body)} bytes, expected {expected})"
        )
    if len(body) > expected:
        raise DatasetFormatError(
            f"{path}: {len(body) - expected} trailing bytes after last block"
        )
    rows = np.frombuffer(body, dtype=record, count=count)
    labels = rows["label"].astype(np.int64)
    if labels.size and labels.max() >= NUM_CLASSES:
        raise DatasetFormatError(
            f"{path}: label {int(labels.max())} outside 0..{NUM_CLASSES - 1}"
        )
    features = np.ascontiguousarray(rows["power_db"], dtype=np.float32)
    return features, labels


def load_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read the CSV export; return ``(features, labels)`` as for binary."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:3] != ["label", "scenario_id", "block_index"]:
            raise DatasetFormatError(f"{path}: unexpected CSV header {header!r}")
        n_bins = len(header) - 3
        if n_bins <= 0 or header[3] != "bin_0":
            raise DatasetFormatError(f"{path}: no power-bin columns in header")
        labels_list: list[int] = []
        feat_rows: list[np.ndarray] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DatasetFormatError(
                    f"{path}: line {line_no} has {len(row)} fields, "
                    f"expected {len(header)}"
                )
            label = int(row[0])
            if not 0 <= label < NUM_CLASSES:
                raise DatasetFormatError(
                    f"{path}: line {line_no} label {label} outside 0..3"
                )
            labels_list.append(label)
            feat_rows.append(np.asarray(row[3:], dtype=np.float32))
    if feat_rows:
        features = np.stack(feat_rows)
    else:
        features = np.empty((0, n_bins), dtype=np.float32)
    return features, np.asarray(labels_list, dtype=np.int64)


def load_dataset(path: str, normalize: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Load either format, sniffing the binary magic bytes first.

    By default each sample is min-max normalized to [0, 1] — the scale the
    classifier trains on.  Pass ``normalize=False`` for raw dB values.
    """
    with open(path, "rb") as fh:
        head = fh.read(4)
    features, labels = load_binary(path) if head == MAGIC else load_csv(path)
    if normalize:
        features = normalize_minmax(features)
    return features, labels


def normalize_minmax(features: np.ndarray) -> np.ndarray:
    """Scale each row to [0, 1] independently; constant rows become zeros.

    Per-sample scaling removes the absolute power level so the network keys
    on spectral shape rather than on how strong the received signal happens
    to be.
    """
    x = np.asarray(features, dtype=np.float32)
    lo = x.min(axis=-1, keepdims=True)
    hi = x.max(axis=-1, keepdims=True)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = (x - lo) / safe
    return np.where(span > 0, out, 0.0).astype(np.float32)


def split_train_test(
    features: np.ndarray,
    labels: np.ndarray,
    test_fraction: float = 0.3,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Seeded shuffle split into ``(x_train, y_train, x_test, y_test)``."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(labels)
    order = np.random.default_rng(seed).permutation(n)
    n_test = int(round(n * test_fraction))
    test_idx = order[:n_test]
    train_idx = order[n_test:]
    return (
        features[train_idx],
        labels[train_idx],
        features[test_idx],
        labels[test_idx],
    )


def kfold_indices(n: int, folds: int, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded k-fold partition: list of ``(train_idx, val_idx)`` pairs."""
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if n < folds:
        raise ValueError(f"cannot split {n} samples into {folds} folds")
    order = np.random.default_rng(seed).permutation(n)
    chunks = np.array_split(order, folds)
    out = []
    for i in range(folds):
        val = chunks[i]
        train = np.concatenate([chunks[j] for j in range(folds) if j != i])
        out.append((train, val))
    return out
