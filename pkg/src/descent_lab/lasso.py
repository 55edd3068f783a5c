"""Coordinate-descent LASSO on frozen random ReLU features.

Objective: ``(1/2n) ||y - X beta||^2 + lam ||beta||_1``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .linalg import NumericError, check_finite, relu
from .model import init_params


@dataclass
class LassoProblem:
    x: np.ndarray
    y: np.ndarray
    lam: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        if self.x.ndim != 2 or self.x.shape[0] < 1 or self.x.shape[1] < 1:
            raise ValueError(f"design must be a non-empty matrix, got shape {self.x.shape}")
        if self.y.shape[0] != self.x.shape[0]:
            raise ValueError("y length must equal the number of rows of x")
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")


@dataclass
class LassoSolution:
    beta: np.ndarray
    iterations: int
    converged: bool
    objective: float
    lam: float = 0.0
    trace: list = field(default_factory=list)  # objective after each sweep
    test_error: float = None

    @property
    def support_size(self):
        return int(np.count_nonzero(self.beta))


def objective(prob, beta):
    r = prob.y - prob.x @ beta
    return float(r @ r / (2 * len(r)) + prob.lam * np.abs(beta).sum())


def random_relu_features(x, k, seed):
    """``relu(x W0^T + b0)`` with ``W0, b0`` from :func:`model.init_params`, never trained."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = init_params(x.shape[1], k, 1, seed)
    return relu(x @ p.w1.T + p.b1)


def lambda_max(x, y):
    """Smallest lambda whose LASSO solution is identically zero."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] != y.shape[0]:
        raise ValueError("shape mismatch")
    return float(np.max(np.abs(x.T @ y)) / x.shape[0])


def kkt_check(prob, beta, tol):
    """First-order optimality certificate for the LASSO objective."""
    beta = np.asarray(beta, dtype=np.float64)
    n = prob.x.shape[0]
    corr = prob.x.T @ (prob.y - prob.x @ beta) / n
    zero = beta == 0.0
    ok_zero = np.abs(corr[zero]) <= prob.lam + tol
    ok_active = np.abs(corr[~zero] - prob.lam * np.sign(beta[~zero])) <= tol
    return bool(ok_zero.all() and ok_active.all())


def coordinate_descent(prob, tol=1e-10, max_iter=10_000, beta0=None):
    """Cyclic coordinate descent.

    Stops once a full sweep moves no coordinate by more than ``tol`` and the
    KKT conditions hold at ``tol``; otherwise reports ``converged=False``
    after ``max_iter`` sweeps. Zero-norm columns keep ``beta_j = 0``; for
    ``lam >= lambda_max`` the zero vector is returned without iterating.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if prob.lam >= lambda_max(prob.x, prob.y):
        zero = np.zeros(prob.x.shape[1])
        obj = objective(prob, zero)
        return LassoSolution(zero, 0, True, obj, prob.lam, [obj])
    x = np.asfortranarray(prob.x)
    col_sq = np.einsum("ij,ij->j", x, x)
    beta = np.zeros(x.shape[1]) if beta0 is None else np.array(beta0, dtype=np.float64)
    beta[col_sq == 0.0] = 0.0
    resid = prob.y - x @ beta
    trace = [objective(prob, beta)]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        change = kernels.cd_sweep(x, beta, resid, col_sq, prob.lam)
        check_finite(beta, "lasso coefficients")
        obj = objective(prob, beta)
        if obj > trace[-1] * (1 + 1e-12) + 1e-15:
            raise NumericError(f"objective increased at sweep {it}: {trace[-1]!r} -> {obj!r}")
        trace.append(obj)
        if change <= tol and kkt_check(prob, beta, tol):
            converged = True
            break
    return LassoSolution(beta, it, converged, trace[-1], prob.lam, trace)


def lasso_path(x, y, lambdas, tol=1e-10, max_iter=10_000, x_eval=None, y_eval=None):
    """Warm-started solutions along a strictly descending lambda grid.

    When evaluation data is given, each solution carries its mean squared
    test error.
    """
    lambdas = [float(v) for v in lambdas]
    if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be strictly descending")
    out = []
    beta = None
    for lam in lambdas:
        sol = coordinate_descent(LassoProblem(x, y, lam), tol, max_iter, beta0=beta)
        if x_eval is not None:
            r = np.asarray(y_eval, dtype=np.float64) - x_eval @ sol.beta
            sol.test_error = float(r @ r / len(r))
        beta = sol.beta
        out.append(sol)
    return out


def standardize(x):
    """Center columns and scale to unit variance; zero-variance columns stay zero.

    Returns ``(x_std, mean, scale)``.
    """
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0.0] = 1.0
    return (x - mean) / scale, mean, scale


@dataclass
class OvrPathPoint:
    lam: float
    support_size: int  # nonzero coefficients summed over classes
    train_acc: float
    test_acc: float
    converged: bool


def one_vs_rest_path(train_x, train_y, test_x, test_y, num_classes, lambdas, tol=1e-8, max_iter=5000):
    """LASSO classification: one +/-1 regression per class, argmax of the outputs.

    Features are standardized and targets centered so the intercept is
    recovered in closed form.
    """
    xs, mean, scale = standardize(train_x)
    xt = (np.asarray(test_x, dtype=np.float64) - mean) / scale
    paths = []
    intercepts = []
    for c in range(num_classes):
        t = np.where(np.asarray(train_y) == c, 1.0, -1.0)
        intercepts.append(t.mean())
        paths.append(lasso_path(xs, t - t.mean(), lambdas, tol, max_iter))
    out = []
    for i, lam in enumerate(lambdas):
        betas = np.stack([paths[c][i].beta for c in range(num_classes)], axis=1)
        b0 = np.array(intercepts)
        train_pred = np.argmax(xs @ betas + b0, axis=1)
        test_pred = np.argmax(xt @ betas + b0, axis=1)
        out.append(
            OvrPathPoint(
                lam=float(lam),
                support_size=int(np.count_nonzero(betas)),
                train_acc=float(np.mean(train_pred == train_y)),
                test_acc=float(np.mean(test_pred == test_y)),
                converged=all(paths[c][i].converged for c in range(num_classes)),
            )
        )
    return out
