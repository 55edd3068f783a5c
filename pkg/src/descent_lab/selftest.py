"""Quick run of the independent-oracle checks, for ``descent-lab selftest``."""

import struct
import time

import numpy as np

from . import oracles
from .dataio import parse_idx_images, parse_idx_labels, synthetic_blobs
from .lasso import LassoProblem, coordinate_descent, kkt_check, lambda_max, objective
from .linalg import Prng, matmul
from .metrics import Curve, find_extrema
from .model import MlpParams, backward, forward, init_params, loss_ce
from .optim import TrainConfig, soft_threshold, train

# First six outputs of the reference PCG32 demo, pcg32_srandom_r(42, 54).
PCG32_REFERENCE = [0xA15C02B7, 0x7B47F409, 0xBA1D3330, 0x83D2F293, 0xBFA4784B, 0xCBED606E]


def check_matmul():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(7, 5)), rng.normal(size=(5, 4))
    err = np.max(np.abs(matmul(a, b) - oracles.naive_matmul(a.tolist(), b.tolist())))
    return err <= 1e-12, f"max |diff| = {err:.2e}"


def check_pcg32():
    p = Prng.from_pcg_seed(42, 54)
    got = [p.next_u32() for _ in PCG32_REFERENCE]
    return got == PCG32_REFERENCE, " ".join(f"{v:08x}" for v in got)


def check_idx():
    img = struct.pack(">4I", 0x803, 1, 2, 2) + bytes([0, 128, 255, 64])
    lab = struct.pack(">2I", 0x801, 3) + bytes([7, 0, 9])
    ok = parse_idx_images(img).tolist() == [[0.0, 128.0, 255.0, 64.0]]
    ok &= parse_idx_labels(lab).tolist() == [7, 0, 9]
    return ok, "hand-built fixtures"


def check_gradients(instances=20):
    worst = 0.0
    for seed in range(instances):
        rng = np.random.default_rng(seed)
        d, k, c, b = (int(v) for v in rng.integers(1, [7, 6, 5, 9]))
        c = max(c, 2)
        p = init_params(d, k, c, seed)
        p = MlpParams(p.w1, rng.normal(size=k) * 0.1, p.w2, rng.normal(size=c) * 0.1)
        x = rng.normal(size=(b, d))
        y = rng.integers(0, c, size=b)
        _, cache = forward(p, x)
        g = backward(p, cache, y)
        fd = oracles.finite_difference_grads(p, x, y)
        for name in ("w1", "b1", "w2", "b2"):
            worst = max(worst, float(np.max(oracles.relative_error(getattr(g, name), fd[name]))))
    return worst <= 1e-5, f"worst relative error {worst:.2e} over {instances} instances"


def check_loss():
    v = loss_ce(np.array([[1.0, 2.0]]), [1])
    return abs(v - np.log1p(np.exp(-1.0))) <= 1e-12, f"{v:.6f}"


def check_prox(samples=100):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(samples):
        v, t = rng.uniform(-2.5, 2.5), rng.uniform(0, 2)
        worst = max(worst, abs(soft_threshold(v, t) - oracles.dense_scan_prox(v, t)))
    return worst <= 1e-3, f"worst |diff| {worst:.2e}"


def check_lasso():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 3))
    y = rng.normal(size=6)
    prob = LassoProblem(x, y, 0.1)
    sol = coordinate_descent(prob, tol=1e-12)
    grid = oracles.lasso_grid_min(x, y, 0.1)
    ok = sol.converged and kkt_check(prob, sol.beta, 1e-8) and objective(prob, sol.beta) <= grid + 1e-6
    top = coordinate_descent(LassoProblem(x, y, 1.01 * lambda_max(x, y)), tol=1e-12)
    ok &= bool(np.all(top.beta == 0.0))
    return ok, f"objective {sol.objective:.6f} vs grid {grid:.6f}"


def check_extrema(curves=1000):
    rng = np.random.default_rng(11)
    for _ in range(curves):
        ys = rng.integers(0, 5, size=int(rng.integers(3, 12))).astype(float)
        rep = find_extrema(Curve(range(1, len(ys) + 1), ys), 0.0)
        mins, maxs = oracles.neighbor_scan_extrema(list(ys))
        if set(rep.minima) != mins or set(rep.maxima) != maxs:
            return False, f"disagreement on {ys.tolist()}"
    return True, f"{curves} random curves"


def check_training():
    ds = synthetic_blobs(200, 3, 2, 10.0, 0)
    _, hist = train(ds, ds, 8, TrainConfig(epochs=30, batch_size=16, lr=0.5, seed=0))
    acc = hist.final.train_acc
    centroid = oracles.nearest_centroid_accuracy(ds.features, ds.labels)
    return acc >= 0.99 and centroid > 0.99, f"train acc {acc:.3f}, nearest centroid {centroid:.3f}"


CHECKS = [
    ("matmul vs triple loop", check_matmul),
    ("pcg32 reference vector", check_pcg32),
    ("idx fixtures", check_idx),
    ("cross-entropy closed form", check_loss),
    ("backprop vs finite differences", check_gradients),
    ("soft-threshold vs dense scan", check_prox),
    ("lasso vs grid and kkt", check_lasso),
    ("extrema vs neighbor scan", check_extrema),
    ("training on separable blobs", check_training),
]


def run(out=print):
    failures = 0
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report, keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail}; {time.perf_counter() - t0:.2f}s)")
    return failures
