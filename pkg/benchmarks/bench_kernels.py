"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; the script checks
that outputs agree, then reports the best-of-N time and the speedup.
"""

import argparse
import time

import numpy as np

from descent_lab import kernels
from descent_lab.dataio import synthetic_blobs
from descent_lab.optim import TrainConfig, train


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    theta = rng.normal(size=25 * 784)
    grad = rng.normal(size=theta.size)
    x = np.asfortranarray(rng.normal(size=(500, 100)))
    col_sq = np.einsum("ij,ij->j", x, x)
    y = rng.normal(size=500)
    state, inc = 0x853C49E6748FEA9B, 0xDA3E39CB94B95BDB

    def fill(impl):
        return impl.pcg32_fill(state, inc, 100_000)[0]

    def perm(impl):
        return impl.pcg32_permutation(state, inc, 60_000)[0]

    def prox(impl):
        t = theta.copy()
        impl.prox_update(t, grad, 0.05, 1e-4)
        return t

    def subgrad(impl):
        t = theta.copy()
        impl.subgradient_update(t, grad, 0.05, 1e-4)
        return t

    def sweep(impl):
        beta = np.zeros(x.shape[1])
        resid = y.copy()
        for _ in range(5):
            impl.cd_sweep(x, beta, resid, col_sq, 0.01)
        return beta

    return [("pcg32_fill n=100k", fill), ("pcg32_permutation n=60k", perm),
            ("prox_update 19.6k", prox), ("subgradient_update 19.6k", subgrad),
            ("cd_sweep 500x100 x5", sweep)]


def training(impl_name):
    ds = synthetic_blobs(200, 10, 50, 3.0, 0)
    impl = kernels.available_backends()[impl_name]
    saved = {n: getattr(kernels, n) for n in ("pcg32_fill", "pcg32_permutation", "prox_update",
                                               "subgradient_update", "cd_sweep")}
    for n in saved:
        setattr(kernels, n, getattr(impl, n))
    try:
        t0 = time.perf_counter()
        params, _ = train(ds, ds, 25, TrainConfig(alpha=1e-4, epochs=5, eval_every=5))
        return time.perf_counter() - t0, params
    finally:
        for n, fn in saved.items():
            setattr(kernels, n, fn)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the python fallback is available")
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + ("    speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        outs = [fn(backends[n]) for n in names]
        if len(outs) > 1 and not np.allclose(outs[0], outs[1], rtol=1e-12, atol=1e-12):
            raise SystemExit(f"{label}: backends disagree")
        times = [best_of(lambda n=n: fn(backends[n]), args.repeat) for n in names]
        row = f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            row += f"  {times[1] / times[0]:8.1f}x"  # python / cython
        print(row)
    results = {n: training(n) for n in names}
    row = f"{'train 2000x50, k=25, 5 ep':28s}" + "".join(f"{results[n][0] * 1e3:10.2f}ms" for n in names)
    if len(names) > 1:
        row += f"  {results['python'][0] / results['cython'][0]:8.1f}x"
        same = results["python"][1].equals(results["cython"][1])
        row += f"  (identical parameters: {same})"
    print(row)


if __name__ == "__main__":
    main()
