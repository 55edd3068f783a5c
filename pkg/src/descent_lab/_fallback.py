"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Random streams and SGD updates are bit-identical to the compiled versions.
``cd_sweep`` agrees up to floating-point summation order.
"""

import numpy as np

BACKEND = "python"

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1
_PCG_MULT = 6364136223846793005


def _pcg32(state, inc):
    old = state
    state = (old * _PCG_MULT + inc) & _MASK64
    xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
    rot = old >> 59
    out = ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & _MASK32
    return out, state


def pcg32_fill(state, inc, n):
    out = np.empty(n, dtype=np.uint32)
    for i in range(n):
        out[i], state = _pcg32(state, inc)
    return out, state


def _bounded(state, inc, bound):
    threshold = ((1 << 32) - bound) % bound
    while True:
        r, state = _pcg32(state, inc)
        if r >= threshold:
            return r % bound, state


def pcg32_permutation(state, inc, n):
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j, state = _bounded(state, inc, i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.array(perm, dtype=np.int64), state


def prox_update(theta, grad, lr, thresh):
    v = theta - lr * grad
    theta[:] = np.where(v > thresh, v - thresh, np.where(v < -thresh, v + thresh, 0.0))


def subgradient_update(theta, grad, lr, alpha):
    theta[:] = theta - lr * (grad + alpha * np.sign(theta))


def cd_sweep(x, beta, resid, col_sq, lam):
    n, p = x.shape
    max_change = 0.0
    for j in range(p):
        if col_sq[j] == 0.0:
            continue
        old = beta[j]
        curv = col_sq[j] / n
        rho = float(x[:, j] @ resid) / n + curv * old
        if rho > lam:
            new = (rho - lam) / curv
        elif rho < -lam:
            new = (rho + lam) / curv
        else:
            new = 0.0
        delta = new - old
        if delta != 0.0:
            resid -= x[:, j] * delta
            beta[j] = new
            max_change = max(max_change, abs(delta))
    return max_change
