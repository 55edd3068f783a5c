"""Compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from descent_lab import kernels
from descent_lab._fallback import (
    cd_sweep as py_cd,
    pcg32_fill as py_fill,
    pcg32_permutation as py_perm,
    prox_update as py_prox,
    subgradient_update as py_sub,
)

compiled = kernels.available_backends().get("cython")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@needs_compiled
@pytest.mark.parametrize("state,inc", [(0, 1), (2**63 + 12345, 2**64 - 1), (987654321, 54 * 2 + 1)])
def test_streams_identical(state, inc):
    a, sa = compiled.pcg32_fill(state, inc, 500)
    b, sb = py_fill(state, inc, 500)
    assert np.array_equal(a, b) and sa == sb
    pa, sa = compiled.pcg32_permutation(state, inc, 300)
    pb, sb = py_perm(state, inc, 300)
    assert np.array_equal(pa, pb) and sa == sb


@needs_compiled
def test_sgd_updates_bitwise_identical():
    rng = np.random.default_rng(0)
    theta = rng.normal(size=1000) * 0.01
    theta[::7] = 0.0
    grad = rng.normal(size=1000)
    for fn_c, fn_p, args in [(compiled.prox_update, py_prox, (0.05, 0.003)),
                             (compiled.subgradient_update, py_sub, (0.05, 0.1))]:
        a, b = theta.copy(), theta.copy()
        fn_c(a, grad, *args)
        fn_p(b, grad, *args)
        assert np.array_equal(a, b)


@needs_compiled
def test_cd_sweep_agrees():
    rng = np.random.default_rng(1)
    x = np.asfortranarray(rng.normal(size=(40, 8)))
    y = rng.normal(size=40)
    col_sq = (x * x).sum(axis=0)
    out = []
    for fn in (compiled.cd_sweep, py_cd):
        beta, resid = np.zeros(8), y.copy()
        changes = [fn(x, beta, resid, col_sq, 0.05) for _ in range(20)]
        out.append((beta, resid, changes))
    np.testing.assert_allclose(out[0][0], out[1][0], atol=1e-12)
    np.testing.assert_allclose(out[0][1], out[1][1], atol=1e-12)
    np.testing.assert_allclose(out[0][2], out[1][2], atol=1e-12)


def test_prox_update_values():
    theta = np.array([0.01, -2.0, 1.0])
    py_prox(theta, np.zeros(3), 0.1, 0.1)
    assert theta.tolist() == [0.0, -1.9, 0.9]
