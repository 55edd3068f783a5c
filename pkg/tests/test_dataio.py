import gzip
import hashlib
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from descent_lab import dataio
from descent_lab.dataio import Dataset, IdxError
from descent_lab.oracles import nearest_centroid_accuracy


def images_bytes(n, rows, cols, payload):
    return struct.pack(">4I", 0x00000803, n, rows, cols) + bytes(payload)


def labels_bytes(n, payload):
    return struct.pack(">2I", 0x00000801, n) + bytes(payload)


def test_parse_images_hand_built():
    m = dataio.parse_idx_images(images_bytes(1, 2, 2, [0, 128, 255, 64]))
    assert m.shape == (1, 4)
    assert m.tolist() == [[0.0, 128.0, 255.0, 64.0]]


def test_parse_images_row_major_flattening():
    m = dataio.parse_idx_images(images_bytes(2, 2, 3, range(12)))
    assert m[1].tolist() == [6, 7, 8, 9, 10, 11]


def test_parse_images_errors():
    with pytest.raises(IdxError, match="magic"):
        dataio.parse_idx_images(labels_bytes(4, [0, 0, 0, 0]))
    with pytest.raises(IdxError, match="truncated"):
        dataio.parse_idx_images(images_bytes(2, 2, 2, [1, 2, 3, 4]))
    with pytest.raises(IdxError, match="truncated"):
        dataio.parse_idx_images(b"\x00\x00\x08")
    with pytest.raises(IdxError, match="overflow"):
        dataio.parse_idx_images(struct.pack(">4I", 0x803, 2**32 - 1, 2**16, 2**16))


def test_parse_labels():
    assert dataio.parse_idx_labels(labels_bytes(3, [7, 0, 9])).tolist() == [7, 0, 9]
    with pytest.raises(IdxError, match="empty"):
        dataio.parse_idx_labels(labels_bytes(0, []))
    with pytest.raises(IdxError, match="magic"):
        dataio.parse_idx_labels(images_bytes(1, 1, 1, [3]))
    with pytest.raises(IdxError, match="truncated"):
        dataio.parse_idx_labels(labels_bytes(3, [1]))


def test_gzip_wrapped_input():
    raw = images_bytes(1, 2, 2, [0, 128, 255, 64])
    assert np.array_equal(dataio.parse_idx_images(gzip.compress(raw)), dataio.parse_idx_images(raw))
    lab = labels_bytes(2, [4, 5])
    assert dataio.parse_idx_labels(gzip.compress(lab)).tolist() == [4, 5]


def test_normalize():
    out = dataio.normalize(np.array([[0.0, 255.0, 51.0]]))
    assert out[0, 0] == 0.0 and out[0, 1] == 1.0 and out[0, 2] == pytest.approx(0.2, abs=1e-15)
    with pytest.raises(ValueError):
        dataio.normalize(np.array([[256.0]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32))
def test_idx_round_trip(n, rows, cols, seed):
    rng = np.random.default_rng(seed)
    raw = rng.integers(0, 256, size=(n, rows * cols)).astype(np.float64)
    labels = rng.integers(0, 10, size=n)
    assert np.array_equal(dataio.parse_idx_images(dataio.serialize_idx_images(raw, rows, cols)), raw)
    assert np.array_equal(dataio.parse_idx_labels(dataio.serialize_idx_labels(labels)), labels)


def test_dataset_invariants():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 3)), [0, 3], 3)
    with pytest.raises(ValueError):
        Dataset(np.full((1, 2), 1.5), [0], 2)
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 3)), [0], 2)


def _row_hashes(ds):
    return sorted(hashlib.sha1(row.tobytes() + bytes([lab])).hexdigest() for row, lab in zip(ds.features, ds.labels))


def test_subsample_properties():
    ds = dataio.synthetic_blobs(20, 3, 4, 2.0, 0)
    full = dataio.subsample(ds, ds.n, 1)
    assert _row_hashes(full) == _row_hashes(ds)
    a, b = dataio.subsample(ds, 10, 5), dataio.subsample(ds, 10, 5)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)
    assert set(_row_hashes(a)) <= set(_row_hashes(ds))
    with pytest.raises(ValueError):
        dataio.subsample(ds, 0, 1)
    with pytest.raises(ValueError):
        dataio.subsample(ds, ds.n + 1, 1)


def test_synthetic_blobs():
    ds = dataio.synthetic_blobs(200, 2, 2, 10.0, 3)
    assert nearest_centroid_accuracy(ds.features, ds.labels) > 0.99
    assert dataio.synthetic_blobs(1, 4, 3, 1.0, 0).n == 4
    again = dataio.synthetic_blobs(200, 2, 2, 10.0, 3)
    assert np.array_equal(ds.features, again.features)
    assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0


def test_load_mnist_from_directory(tmp_path):
    rng = np.random.default_rng(0)
    for prefix, n in (("train", 6), ("t10k", 3)):
        raw = rng.integers(0, 256, size=(n, 4))
        (tmp_path / f"{prefix}-images-idx3-ubyte.gz").write_bytes(gzip.compress(dataio.serialize_idx_images(raw, 2, 2)))
        (tmp_path / f"{prefix}-labels-idx1-ubyte").write_bytes(dataio.serialize_idx_labels(rng.integers(0, 10, n)))
    train, test = dataio.load_mnist(tmp_path)
    assert (train.n, test.n, train.d) == (6, 3, 4)
    assert train.features.max() <= 1.0


def test_load_mnist_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        dataio.load_mnist(tmp_path)


def test_data_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv(dataio.DATA_ENV, str(tmp_path))
    assert dataio.resolve_data_dir() == tmp_path
    assert dataio.resolve_data_dir("elsewhere").name == "elsewhere"


@pytest.mark.slow
def test_real_mnist_subsample_proportions(mnist_path):
    train, test = dataio.load_mnist(mnist_path)
    assert (train.n, test.n, train.d) == (60000, 10000, 784)
    assert 0.0 <= train.features.min() and train.features.max() <= 1.0
    source = np.bincount(train.labels, minlength=10) / train.n
    sub = dataio.subsample(train, 5000, 0)
    kept = np.bincount(sub.labels, minlength=10) / sub.n
    assert np.max(np.abs(kept - source)) <= 0.03
