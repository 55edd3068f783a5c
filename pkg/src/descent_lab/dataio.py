"""MNIST IDX parsing, normalization, subsampling and synthetic fixtures.

The parsers take raw bytes (optionally gzip-wrapped); only
:func:`load_mnist` touches the filesystem.
"""

import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import Prng

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
DATA_ENV = "DESCENT_LAB_DATA"


class IdxError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise ValueError("dataset needs at least one 2-D feature row")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels must align with feature rows")
        if labels.min() < 0 or labels.max() >= self.num_classes:
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        if features.min() < 0.0 or features.max() > 1.0:
            raise ValueError("features must lie in [0, 1]")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]


def _maybe_gunzip(data):
    data = bytes(data)
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def _header(data, magic, ndims):
    size = 4 * (1 + ndims)
    if len(data) >= 4:
        (found,) = struct.unpack(">I", data[:4])
        if found != magic:
            raise IdxError(f"bad magic 0x{found:08x}, expected 0x{magic:08x}")
    if len(data) < size:
        raise IdxError(f"truncated header: {len(data)} bytes")
    return struct.unpack(f">{ndims}I", data[4:size]), size


def parse_idx_images(data):
    """Parse an IDX image file into an ``n x (rows*cols)`` matrix of raw 0-255 values."""
    data = _maybe_gunzip(data)
    (n, rows, cols), offset = _header(data, IMAGES_MAGIC, 3)
    if n == 0 or rows == 0 or cols == 0:
        raise IdxError(f"empty image file (dims {n}x{rows}x{cols})")
    pixels = n * rows * cols
    if pixels > 2**40:
        raise IdxError(f"dimension overflow: {n}x{rows}x{cols}")
    if len(data) - offset < pixels:
        raise IdxError(f"truncated payload: need {pixels} bytes, have {len(data) - offset}")
    if len(data) - offset > pixels:
        raise IdxError(f"trailing bytes after {pixels}-byte payload")
    raw = np.frombuffer(data, dtype=np.uint8, count=pixels, offset=offset)
    return raw.reshape(n, rows * cols).astype(np.float64)


def parse_idx_labels(data):
    data = _maybe_gunzip(data)
    (n,), offset = _header(data, LABELS_MAGIC, 1)
    if n == 0:
        raise IdxError("empty label file")
    if len(data) - offset < n:
        raise IdxError(f"truncated payload: need {n} bytes, have {len(data) - offset}")
    if len(data) - offset > n:
        raise IdxError(f"trailing bytes after {n}-byte payload")
    return np.frombuffer(data, dtype=np.uint8, count=n, offset=offset).astype(np.int64)


def serialize_idx_images(raw, rows, cols):
    raw = np.asarray(raw)
    n = raw.shape[0]
    if raw.shape[1] != rows * cols:
        raise ValueError("row length does not match rows*cols")
    if raw.min() < 0 or raw.max() > 255 or not np.all(raw == np.round(raw)):
        raise ValueError("image values must be integers in [0, 255]")
    return struct.pack(">4I", IMAGES_MAGIC, n, rows, cols) + raw.astype(np.uint8).tobytes()


def serialize_idx_labels(labels):
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() > 255:
        raise ValueError("labels must fit in one byte")
    return struct.pack(">2I", LABELS_MAGIC, len(labels)) + labels.astype(np.uint8).tobytes()


def normalize(raw):
    raw = np.asarray(raw, dtype=np.float64)
    if raw.min() < 0.0 or raw.max() > 255.0:
        raise ValueError("raw intensities must lie in [0, 255]")
    return raw / 255.0


def subsample(ds, n_keep, seed):
    """Keep the first ``n_keep`` rows of a seeded Fisher-Yates permutation."""
    if not 1 <= n_keep <= ds.n:
        raise ValueError(f"n_keep must be in [1, {ds.n}], got {n_keep}")
    idx = Prng(seed).permutation(ds.n)[:n_keep]
    return Dataset(ds.features[idx], ds.labels[idx], ds.num_classes)


def synthetic_blobs(n_per_class, num_classes, d, separation, seed):
    """Unit-variance Gaussian blobs, rescaled into [0, 1].

    Centers are ``separation`` apart: class ``c`` sits at ``separation *
    e_(c mod d)`` stacked along further multiples when classes outnumber
    dimensions, so every pair of centers is at least ``separation`` apart.
    """
    if min(n_per_class, num_classes, d) < 1:
        raise ValueError("counts must be >= 1")
    rng = Prng(seed)
    centers = np.zeros((num_classes, d))
    for c in range(num_classes):
        centers[c, c % d] = separation * (1 + c // d)
    n = n_per_class * num_classes
    labels = np.repeat(np.arange(num_classes), n_per_class)
    x = centers[labels] + rng.gaussians(n * d).reshape(n, d)
    lo, hi = x.min(), x.max()
    x = (x - lo) / (hi - lo) if hi > lo else np.zeros_like(x)
    return Dataset(np.clip(x, 0.0, 1.0), labels, num_classes)


_NAMES = {
    "train_images": ("train-images-idx3-ubyte", "train-images.idx3-ubyte"),
    "train_labels": ("train-labels-idx1-ubyte", "train-labels.idx1-ubyte"),
    "test_images": ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
    "test_labels": ("t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"),
}


def resolve_data_dir(data_dir=None):
    """Return ``data_dir``, else ``$DESCENT_LAB_DATA``, else ``./data/mnist``."""
    if data_dir:
        return Path(data_dir)
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path("data") / "mnist"


def _find(directory, key):
    for name in _NAMES[key]:
        for candidate in (directory / name, directory / (name + ".gz")):
            if candidate.is_file():
                return candidate
    raise FileNotFoundError(f"no {_NAMES[key][0]}[.gz] in {directory}")


def load_mnist(data_dir=None):
    """Load the standard train/test IDX files as normalized datasets."""
    directory = resolve_data_dir(data_dir)
    out = []
    for split in ("train", "test"):
        images = parse_idx_images(_find(directory, f"{split}_images").read_bytes())
        labels = parse_idx_labels(_find(directory, f"{split}_labels").read_bytes())
        if images.shape[0] != labels.shape[0]:
            raise IdxError(f"{split}: {images.shape[0]} images but {labels.shape[0]} labels")
        images /= 255.0  # uint8 payload, always in range
        out.append(Dataset(images, labels, 10))
    return tuple(out)
