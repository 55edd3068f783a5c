"""Brute-force reference computations used to check the fast paths.

None of these share code with the routines they check.
"""

import itertools
import math

import numpy as np


def naive_matmul(a, b):
    m, k = len(a), len(a[0])
    n = len(b[0])
    out = [[0.0] * n for _ in range(m)]
    for i in range(m):
        for j in range(n):
            s = 0.0
            for t in range(k):
                s += a[i][t] * b[t][j]
            out[i][j] = s
    return np.array(out)


def _ce_loss(w1, b1, w2, b2, x, labels):
    """Mean cross-entropy, written out row by row."""
    total = 0.0
    for row, lab in zip(x, labels):
        hidden = [max(0.0, sum(w1[j][i] * row[i] for i in range(len(row))) + b1[j]) for j in range(len(b1))]
        logits = [sum(w2[c][j] * hidden[j] for j in range(len(hidden))) + b2[c] for c in range(len(b2))]
        top = max(logits)
        lse = top + math.log(sum(math.exp(z - top) for z in logits))
        total += lse - logits[lab]
    return total / len(labels)


def finite_difference_grads(params, x, labels, h=1e-5):
    """Central differences of the mean cross-entropy for every parameter entry."""
    blocks = {name: np.array(v, dtype=np.float64) for name, v in params.blocks().items()}
    out = {}
    for name, arr in blocks.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = _ce_loss(blocks["w1"], blocks["b1"], blocks["w2"], blocks["b2"], x, labels)
            flat[i] = keep - h
            down = _ce_loss(blocks["w1"], blocks["b1"], blocks["w2"], blocks["b2"], x, labels)
            flat[i] = keep
            g.reshape(-1)[i] = (up - down) / (2 * h)
        out[name] = g
    return out


def relative_error(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-8)


def dense_scan_prox(v, t, lo=-3.0, hi=3.0, step=1e-4):
    """argmin over a grid of 0.5*(x - v)^2 + t*|x|."""
    grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    vals = 0.5 * (grid - v) ** 2 + t * np.abs(grid)
    return float(grid[np.argmin(vals)])


def lasso_grid_min(x, y, lam, lo=-2.0, hi=2.0, step=0.05):
    """Minimum LASSO objective over a cubic grid of coefficient vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = x.shape
    axis = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    best = math.inf
    # chunk over the first coordinate to bound memory
    rest = np.array(list(itertools.product(axis, repeat=p - 1))) if p > 1 else np.zeros((1, 0))
    for b0 in axis:
        betas = np.hstack([np.full((len(rest), 1), b0), rest])
        r = y[None, :] - betas @ x.T
        obj = (r * r).sum(axis=1) / (2 * n) + lam * np.abs(betas).sum(axis=1)
        best = min(best, float(obj.min()))
    return best


def neighbor_scan_extrema(ys):
    """Interior minima/maxima of a sequence, treating runs of equal values as one point.

    For each index, walk outwards past equal neighbors; a run counts as a
    minimum when both walls are higher and it does not touch either end.
    Returns the sets of run start indices for minima and maxima.
    """
    n = len(ys)
    minima, maxima = set(), set()
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ys[j + 1] == ys[i]:
            j += 1
        if i > 0 and j < n - 1:
            if ys[i - 1] > ys[i] and ys[j + 1] > ys[i]:
                minima.add(i)
            if ys[i - 1] < ys[i] and ys[j + 1] < ys[i]:
                maxima.add(i)
        i = j + 1
    return minima, maxima


def nearest_centroid_accuracy(features, labels):
    labels = np.asarray(labels)
    classes = np.unique(labels)
    centroids = np.stack([features[labels == c].mean(axis=0) for c in classes])
    d2 = ((features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(classes[np.argmin(d2, axis=1)] == labels))
