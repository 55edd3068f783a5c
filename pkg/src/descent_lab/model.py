"""Two-layer ReLU perceptron: parameters, forward pass, loss and backprop."""

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import Prng, ShapeError, check_finite, matmul, relu, row_broadcast_add

CHECKPOINT_MAGIC = 0x4D4C5031  # "MLP1"


@dataclass(eq=False)
class MlpParams:
    w1: np.ndarray  # (k, d)
    b1: np.ndarray  # (k,)
    w2: np.ndarray  # (C, k)
    b2: np.ndarray  # (C,)

    def __post_init__(self):
        k, d = self.w1.shape
        c = self.w2.shape[0]
        if self.b1.shape != (k,) or self.w2.shape != (c, k) or self.b2.shape != (c,):
            raise ShapeError(
                f"inconsistent shapes w1{self.w1.shape} b1{self.b1.shape} "
                f"w2{self.w2.shape} b2{self.b2.shape}"
            )

    @property
    def d(self):
        return self.w1.shape[1]

    @property
    def k(self):
        return self.w1.shape[0]

    @property
    def c(self):
        return self.w2.shape[0]

    @property
    def num_params(self):
        return self.k * self.d + self.k + self.c * self.k + self.c

    def blocks(self):
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def copy(self):
        return MlpParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def equals(self, other):
        return all(np.array_equal(a, b) for a, b in zip(self.blocks().values(), other.blocks().values()))


# Gradients share the parameter layout.
Gradients = MlpParams


@dataclass(eq=False)
class ForwardCache:
    x: np.ndarray
    z1: np.ndarray
    a1: np.ndarray
    logits: np.ndarray


def init_params(d, k, c, seed):
    """He-uniform weights (limit sqrt(6 / fan_in)), zero biases.

    Draw order: w1 row-major, then w2 row-major, from ``Prng(seed)``.
    """
    if min(d, k, c) < 1:
        raise ValueError("d, k and c must be >= 1")
    rng = Prng(seed)
    lim1 = math.sqrt(6.0 / d)
    w1 = (2.0 * rng.uniforms(k * d) - 1.0).reshape(k, d) * lim1
    lim2 = math.sqrt(6.0 / k)
    w2 = (2.0 * rng.uniforms(c * k) - 1.0).reshape(c, k) * lim2
    return MlpParams(w1, np.zeros(k), w2, np.zeros(c))


def forward(p, x):
    if x.ndim != 2 or x.shape[1] != p.d:
        raise ShapeError(f"input {x.shape} does not match input dimension {p.d}")
    z1 = row_broadcast_add(matmul(x, p.w1.T), p.b1)
    a1 = relu(z1)
    logits = row_broadcast_add(matmul(a1, p.w2.T), p.b2)
    return logits, ForwardCache(x, z1, a1, logits)


def _check_labels(labels, b, c):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (b,):
        raise ShapeError(f"expected {b} labels, got shape {labels.shape}")
    if b and (labels.min() < 0 or labels.max() >= c):
        raise ValueError(f"labels must lie in [0, {c})")
    return labels


def log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def loss_ce(logits, labels):
    """Mean softmax cross-entropy, stabilized by subtracting each row's max."""
    labels = _check_labels(labels, logits.shape[0], logits.shape[1])
    logp = log_softmax(logits)
    return float(-logp[np.arange(len(labels)), labels].mean())


def logits_grad(logits, labels):
    """d(mean CE)/d(logits): (softmax - onehot) / B."""
    labels = _check_labels(labels, logits.shape[0], logits.shape[1])
    g = np.exp(log_softmax(logits))
    g[np.arange(len(labels)), labels] -= 1.0
    return g / len(labels)


def backward(p, cache, labels):
    """Exact gradient of :func:`loss_ce` (data term only).

    The ReLU derivative at exactly zero is taken as zero.
    """
    b = cache.x.shape[0]
    if cache.z1.shape != (b, p.k) or cache.logits.shape != (b, p.c) or cache.x.shape[1] != p.d:
        raise ShapeError("stale forward cache: shapes do not match parameters")
    dlogits = logits_grad(cache.logits, labels)
    gw2 = matmul(dlogits.T, cache.a1)
    gb2 = dlogits.sum(axis=0)
    dz1 = matmul(dlogits, p.w2) * (cache.z1 > 0.0)
    gw1 = matmul(dz1.T, cache.x)
    gb1 = dz1.sum(axis=0)
    return Gradients(gw1, check_finite(gb1), gw2, check_finite(gb2))


def predict(p, x):
    """Per-row argmax of the logits; ties go to the lowest class index."""
    logits, _ = forward(p, x)
    return np.argmax(logits, axis=1)


def to_bytes(p):
    header = struct.pack("<5I", CHECKPOINT_MAGIC, p.d, p.k, p.c, 0)
    body = b"".join(np.asarray(a, dtype="<f8").tobytes(order="C") for a in p.blocks().values())
    return header + body


def from_bytes(data):
    if len(data) < 20:
        raise ValueError("checkpoint too short")
    magic, d, k, c, _ = struct.unpack("<5I", data[:20])
    if magic != CHECKPOINT_MAGIC:
        raise ValueError(f"bad checkpoint magic 0x{magic:08x}")
    sizes = [k * d, k, c * k, c]
    if len(data) != 20 + 8 * sum(sizes):
        raise ValueError("checkpoint payload size does not match header")
    flat = np.frombuffer(data, dtype="<f8", offset=20).astype(np.float64)
    parts = np.split(flat, np.cumsum(sizes)[:-1])
    return MlpParams(parts[0].reshape(k, d), parts[1].copy(), parts[2].reshape(c, k), parts[3].copy())


def save_checkpoint(p, path):
    Path(path).write_bytes(to_bytes(p))


def load_checkpoint(path):
    return from_bytes(Path(path).read_bytes())
