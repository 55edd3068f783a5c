import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from descent_lab import oracles
from descent_lab.metrics import (
    Curve,
    CurveTooShort,
    accuracy,
    argmin_alpha,
    find_extrema,
    minima_alignment,
    noise_tol_from_seeds,
    sparsity,
)
from descent_lab.model import MlpParams


def _params(w1, w2):
    w1, w2 = np.asarray(w1, float), np.asarray(w2, float)
    return MlpParams(w1, np.zeros(w1.shape[0]), w2, np.zeros(w2.shape[0]))


def _curve(ys):
    return Curve(range(1, len(ys) + 1), ys)


def test_sparsity_counts_weights_not_biases():
    p = _params([[0.0, 0.5], [1e-4, -2.0]], [[0.0, 0.0]])
    p.b1[:] = 0.0
    rep = sparsity(p)
    assert rep.w1 == 0.5
    assert rep.w2 == 1.0
    assert rep.overall == pytest.approx(4 / 6)


def test_sparsity_eps_boundary_inclusive():
    p = _params([[1e-3, -1e-3]], [[2e-3]])
    assert sparsity(p, 1e-3).overall == pytest.approx(2 / 3)
    assert sparsity(p, 0.0).overall == 0.0
    with pytest.raises(ValueError):
        sparsity(p, -1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4), st.floats(0, 1), st.floats(0, 1))
def test_sparsity_monotone_in_eps(vals, e1, e2):
    p = _params([vals[:2]], [[vals[2]], [vals[3]]])
    lo, hi = sorted((e1, e2))
    assert sparsity(p, lo).overall <= sparsity(p, hi).overall


def test_accuracy():
    assert accuracy([1, 2, 3], [1, 2, 0]) == pytest.approx(2 / 3)
    assert accuracy([4], [4]) == 1.0
    with pytest.raises(ValueError):
        accuracy([1, 2], [1])
    with pytest.raises(ValueError):
        accuracy([], [])


def test_curve_rejects_unsorted_xs():
    with pytest.raises(ValueError):
        Curve([1, 1, 2], [0, 0, 0])
    with pytest.raises(ValueError):
        Curve([1, 2], [0])


def test_too_short():
    with pytest.raises(CurveTooShort):
        find_extrema(_curve([1.0, 2.0]))


def test_monotone_curve_has_no_extrema():
    rep = find_extrema(_curve([5, 4, 3, 2, 1]))
    assert rep.minima == [] and rep.maxima == []
    assert rep.descent_count == 1 and rep.ascent_count == 0
    assert not rep.double_descent
    assert rep.left_end == "max" and rep.right_end == "min"


def test_v_shape():
    rep = find_extrema(_curve([3, 1, 2]))
    assert rep.minima == [1]
    assert rep.maxima == []
    assert not rep.double_descent


def test_w_shape_is_double_descent():
    rep = find_extrema(_curve([3, 1, 2, 0.5, 4]))
    assert rep.minima == [1, 3]
    assert rep.maxima == [2]
    assert rep.descent_count == 2 and rep.ascent_count == 2
    assert rep.double_descent


def test_fall_rise_fall_counts_endpoint_minimum():
    # second descent runs off the grid: the right end is the second minimum
    rep = find_extrema(_curve([3, 1, 2, 0.5]))
    assert rep.minima == [1] and rep.maxima == [2]
    assert rep.right_end == "min"
    assert rep.double_descent


def test_noise_tol_merges_plateaus():
    ys = [3, 1, 1.05, 0.98, 2, 2.01, 0.5, 4]
    rep = find_extrema(_curve(ys), noise_tol=0.1)
    assert rep.minima == [3, 6]
    assert rep.maxima == [5]  # highest point of the plateau
    assert rep.double_descent
    # wiggles below the tolerance vanish entirely
    flat = find_extrema(_curve([1.0, 1.02, 0.99, 1.01]), noise_tol=0.05)
    assert flat.minima == [] and flat.maxima == [] and not flat.double_descent


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 6), min_size=3, max_size=15),
    st.floats(-100, 100),
    st.lists(st.floats(0.01, 10), min_size=15, max_size=15),
)
def test_extrema_invariant_to_shift_and_grid(ys, shift, gaps):
    ys = [float(y) for y in ys]
    base = find_extrema(_curve(ys), 0.0)
    shifted = find_extrema(_curve([y + shift for y in ys]), 0.0)
    xs = np.cumsum(gaps[: len(ys)])
    regrid = find_extrema(Curve(xs, ys), 0.0)
    for other in (shifted, regrid):
        assert other.minima == base.minima
        assert other.maxima == base.maxima
        assert other.double_descent == base.double_descent


def test_extrema_against_neighbor_scan():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        ys = rng.integers(0, 5, size=int(rng.integers(3, 14))).astype(float)
        rep = find_extrema(_curve(ys), 0.0)
        mins, maxs = oracles.neighbor_scan_extrema(list(ys))
        assert set(rep.minima) == mins, ys
        assert set(rep.maxima) == maxs, ys


def test_argmin_alpha_ties_pick_smallest_alpha():
    c = Curve([1e-3, 1e-2, 1e-1, 1.0], [0.5, 0.2, 0.2, 0.3])
    assert argmin_alpha(c) == 1e-2


def test_alignment():
    xs = [1e-4, 1e-3, 1e-2, 1e-1, 1.0]
    a = Curve(xs, [5, 3, 1, 2, 4])
    rep = minima_alignment({25: a, 50: a}, g=0)
    assert rep.aligned and rep.spread == 0
    assert rep.argmin_alpha == {25: 1e-2, 50: 1e-2}

    b = Curve(xs, [5, 3, 2, 1, 4])
    assert minima_alignment({25: a, 50: b}, g=1).aligned
    assert not minima_alignment({25: a, 50: b}, g=0).aligned

    far = Curve(xs, [1, 3, 4, 5, 6])
    c = Curve(xs, [6, 5, 4, 3, 1])
    rep = minima_alignment({25: far, 50: c}, g=1)
    assert rep.spread == 4 and not rep.aligned

    with pytest.raises(ValueError):
        minima_alignment({25: a, 50: Curve([1, 2, 3, 4, 5], a.ys)})
    with pytest.raises(ValueError):
        minima_alignment({})


def test_noise_tol_from_seeds():
    per_seed = np.array([[1.0, 2.0, 3.0], [3.0, 2.0, 5.0]])
    stds = np.std(per_seed, axis=0, ddof=1)
    assert noise_tol_from_seeds(per_seed) == pytest.approx(0.25 * stds.mean())
    assert noise_tol_from_seeds(per_seed[:1]) == 0.0
