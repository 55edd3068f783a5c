"""Dense float64 matrix helpers and the PCG32 random stream.

Matrices are plain 2-D ``numpy.float64`` arrays. Every helper here
validates shapes and, unless ``DESCENT_LAB_NO_CHECKS`` is set, rejects
non-finite results with :class:`NumericError`.
"""

import math
import os

import numpy as np

from . import kernels

CHECK_FINITE = os.environ.get("DESCENT_LAB_NO_CHECKS", "") in ("", "0")

_MASK64 = (1 << 64) - 1


class ShapeError(ValueError):
    pass


class NumericError(ArithmeticError):
    """A NaN or infinity appeared in a result."""


def check_finite(a, what="result"):
    if CHECK_FINITE and not np.all(np.isfinite(a)):
        raise NumericError(f"non-finite values in {what}")
    return a


def as_matrix(data):
    """Build a validated, C-contiguous float64 matrix from array-like data."""
    a = np.ascontiguousarray(data, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ShapeError(f"matrix must be 2-D, got {a.ndim}-D")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"empty matrix {a.shape}")
    return check_finite(a, "matrix")


def zeros(rows, cols):
    if rows < 1 or cols < 1:
        raise ShapeError(f"empty matrix ({rows}, {cols})")
    return np.zeros((rows, cols))


def identity(n):
    return np.eye(n)


def matmul(a, b):
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = a @ b
    return check_finite(out, "matmul")


def relu(a):
    return np.maximum(a, 0.0)


def elementwise(a, b, op):
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if op == "add":
        out = a + b
    elif op == "sub":
        out = a - b
    elif op == "hadamard":
        out = a * b
    else:
        raise ValueError(f"unknown elementwise op {op!r}")
    return check_finite(out, op)


def scale(a, s):
    return check_finite(a * s, "scale")


def transpose(a):
    return np.ascontiguousarray(a.T)


def row_broadcast_add(a, v):
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if a.ndim != 2 or v.shape[0] != a.shape[1]:
        raise ShapeError(f"cannot add row vector of length {v.shape[0]} to {a.shape}")
    return check_finite(a + v, "row_broadcast_add")


def splitmix64(x):
    """One SplitMix64 step: return ``(output, next_state)``."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), x


def derive_seed(*parts):
    """Mix integers into one 64-bit seed, e.g. ``derive_seed(seed, k, alpha_index)``."""
    state = 0
    for part in parts:
        out, state = splitmix64(state ^ (int(part) & _MASK64))
        state = out
    return state


class Prng:
    """PCG32 (XSH-RR 64/32) seeded by SplitMix64 expansion of one 64-bit seed.

    Single owner; not safe to share between threads.
    """

    def __init__(self, seed):
        initstate, s = splitmix64(int(seed) & _MASK64)
        initseq, _ = splitmix64(s)
        self._srandom(initstate, initseq)

    @classmethod
    def from_pcg_seed(cls, initstate, initseq):
        """Seed exactly like the reference ``pcg32_srandom_r(initstate, initseq)``."""
        p = cls.__new__(cls)
        p._srandom(initstate, initseq)
        return p

    def _srandom(self, initstate, initseq):
        self.inc = ((initseq << 1) | 1) & _MASK64
        self.state = 0
        self.next_u32()
        self.state = (self.state + initstate) & _MASK64
        self.next_u32()

    def next_u32(self):
        out, self.state = kernels.pcg32_fill(self.state, self.inc, 1)
        return int(out[0])

    def u32s(self, n):
        out, self.state = kernels.pcg32_fill(self.state, self.inc, n)
        return out

    def uniform(self):
        """Float in [0, 1) with 32 bits of resolution."""
        return self.next_u32() * 2.0**-32

    def uniforms(self, n):
        return self.u32s(n) * 2.0**-32

    def gaussian(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def gaussians(self, n):
        u = self.uniforms(2 * n).reshape(n, 2)
        return np.sqrt(-2.0 * np.log(1.0 - u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])

    def permutation(self, n):
        """Fisher-Yates shuffle of ``0..n-1`` using unbiased bounded draws."""
        perm, self.state = kernels.pcg32_permutation(self.state, self.inc, n)
        return perm
