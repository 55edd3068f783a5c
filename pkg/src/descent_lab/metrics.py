"""Sparsity measurement and analysis of test-error-vs-alpha curves."""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_SPARSITY_EPS = 1e-3
NOISE_TOL_FACTOR = 0.25


class CurveTooShort(ValueError):
    pass


@dataclass(frozen=True)
class SparsityReport:
    w1: float
    w2: float
    overall: float


def sparsity(p, eps=DEFAULT_SPARSITY_EPS):
    """Fraction of weight entries with ``|w| <= eps``; biases are not counted."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    z1 = int(np.count_nonzero(np.abs(p.w1) <= eps))
    z2 = int(np.count_nonzero(np.abs(p.w2) <= eps))
    return SparsityReport(z1 / p.w1.size, z2 / p.w2.size, (z1 + z2) / (p.w1.size + p.w2.size))


def accuracy(pred, truth):
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1 or len(pred) == 0:
        raise ValueError(f"length mismatch or empty: {pred.shape} vs {truth.shape}")
    return float(np.count_nonzero(pred == truth)) / len(pred)


@dataclass(frozen=True)
class Curve:
    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) != len(ys):
            raise ValueError("xs and ys differ in length")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("xs must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self):
        return len(self.xs)


@dataclass(frozen=True)
class ExtremaReport:
    """Interior extrema of a curve after plateau merging.

    ``minima``/``maxima`` hold interior points only. ``left_end`` and
    ``right_end`` classify the endpoints against their single neighbor as
    ``"min"``, ``"max"`` or ``"flat"``.
    """

    minima: list = field(default_factory=list)
    maxima: list = field(default_factory=list)
    descent_count: int = 0
    ascent_count: int = 0
    double_descent: bool = False
    left_end: str = "flat"
    right_end: str = "flat"


def _plateaus(ys, tol):
    groups = [[0]]
    for i in range(1, len(ys)):
        if abs(ys[i] - ys[i - 1]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def find_extrema(curve, noise_tol=0.0):
    """Locate minima/maxima and count descents on a curve.

    Consecutive points within ``noise_tol`` of each other are merged into
    one plateau represented by its mean. A plateau is a minimum (maximum)
    when it lies more than ``noise_tol`` below (above) both neighbors; the
    reported index is the lowest (highest) point inside it. The curve shows
    double descent when some interior maximum has a minimum, interior or
    endpoint, on each side.
    """
    ys = list(curve.ys)
    if len(ys) < 3:
        raise CurveTooShort(f"need at least 3 points, got {len(ys)}")
    groups = _plateaus(ys, noise_tol)
    vals = [float(np.mean([ys[i] for i in g])) for g in groups]
    m = len(groups)
    if m == 1:
        return ExtremaReport()

    def lowest(g):
        return min(g, key=lambda i: (ys[i], i))

    def highest(g):
        return min(g, key=lambda i: (-ys[i], i))

    kinds = [None] * m
    for j in range(1, m - 1):
        if vals[j] < vals[j - 1] - noise_tol and vals[j] < vals[j + 1] - noise_tol:
            kinds[j] = "min"
        elif vals[j] > vals[j - 1] + noise_tol and vals[j] > vals[j + 1] + noise_tol:
            kinds[j] = "max"

    def end_kind(j, nb):
        if vals[j] < vals[nb] - noise_tol:
            return "min"
        if vals[j] > vals[nb] + noise_tol:
            return "max"
        return "flat"

    left, right = end_kind(0, 1), end_kind(m - 1, m - 2)

    steps = []
    for j in range(1, m):
        diff = vals[j] - vals[j - 1]
        steps.append("down" if diff < -noise_tol else "up" if diff > noise_tol else "flat")
    descents = sum(1 for j, s in enumerate(steps) if s == "down" and (j == 0 or steps[j - 1] != "down"))
    ascents = sum(1 for j, s in enumerate(steps) if s == "up" and (j == 0 or steps[j - 1] != "up"))

    minima_groups = [j for j in range(m) if kinds[j] == "min"]
    if left == "min":
        minima_groups.insert(0, 0)
    if right == "min":
        minima_groups.append(m - 1)
    double = any(
        kinds[j] == "max"
        and any(i < j for i in minima_groups)
        and any(i > j for i in minima_groups)
        for j in range(1, m - 1)
    )
    return ExtremaReport(
        minima=[lowest(groups[j]) for j in range(m) if kinds[j] == "min"],
        maxima=[highest(groups[j]) for j in range(m) if kinds[j] == "max"],
        descent_count=descents,
        ascent_count=ascents,
        double_descent=double,
        left_end=left,
        right_end=right,
    )


def argmin_index(curve):
    if len(curve) == 0:
        raise ValueError("empty curve")
    return int(np.argmin(curve.ys))  # first occurrence = smallest x


def argmin_alpha(curve):
    return curve.xs[argmin_index(curve)]


@dataclass(frozen=True)
class AlignmentReport:
    argmin_alpha: dict
    argmin_index: dict
    spread: int
    tolerance_steps: int
    aligned: bool


def minima_alignment(curves, g=1):
    """Compare the minimizing grid point across widths.

    ``curves`` maps kernel dimension to a :class:`Curve`; all must share one
    x grid. Aligned means the argmin indices span at most ``g`` grid steps.
    """
    if not curves:
        raise ValueError("no curves")
    grids = {c.xs for c in curves.values()}
    if len(grids) != 1:
        raise ValueError("curves do not share the same x grid")
    idx = {k: argmin_index(c) for k, c in curves.items()}
    spread = max(idx.values()) - min(idx.values())
    return AlignmentReport(
        argmin_alpha={k: curves[k].xs[i] for k, i in idx.items()},
        argmin_index=idx,
        spread=spread,
        tolerance_steps=g,
        aligned=spread <= g,
    )


def noise_tol_from_seeds(per_seed):
    """``NOISE_TOL_FACTOR`` times the mean across-seed std of a (seeds x points) array.

    Returns 0 with fewer than two seeds.
    """
    a = np.asarray(per_seed, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 2:
        return 0.0
    return float(NOISE_TOL_FACTOR * np.mean(np.std(a, axis=0, ddof=1)))
