"""L1-regularized SGD (subgradient or proximal) and the training loop."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .linalg import NumericError, Prng, check_finite, derive_seed
from .metrics import DEFAULT_SPARSITY_EPS, accuracy, sparsity
from .model import MlpParams, backward, forward, init_params, loss_ce

L1_MODES = ("subgradient", "proximal")
_SHUFFLE_STREAM = 0x53485546  # keeps shuffling independent of the init stream


@dataclass
class TrainConfig:
    alpha: float = 0.0
    lr: float = 0.05
    batch_size: int = 64
    epochs: int = 40
    seed: int = 0
    l1_mode: str = "proximal"
    regularize_biases: bool = False
    eval_every: int = 10
    eps_sparsity: float = DEFAULT_SPARSITY_EPS

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.lr > 0.0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if self.batch_size < 1 or self.epochs < 1 or self.eval_every < 1:
            raise ValueError("batch_size, epochs and eval_every must be >= 1")
        if self.l1_mode not in L1_MODES:
            raise ValueError(f"l1_mode must be one of {L1_MODES}, got {self.l1_mode!r}")


@dataclass
class Snapshot:
    epoch: int
    train_loss: float
    train_penalty: float
    test_loss: float
    train_acc: float
    test_acc: float
    sparsity_w1: float
    sparsity_w2: float
    sparsity_all: float


@dataclass
class TrainHistory:
    snapshots: list = field(default_factory=list)

    @property
    def final(self):
        return self.snapshots[-1]

    def to_json(self):
        return json.dumps([asdict(s) for s in self.snapshots], sort_keys=True)


class DivergenceError(RuntimeError):
    """Training produced a non-finite value.

    Carries the epoch of failure, the history up to the last finite
    snapshot and the last finite parameters.
    """

    def __init__(self, epoch, history, params):
        super().__init__(f"training diverged at epoch {epoch}")
        self.epoch = epoch
        self.history = history
        self.params = params


def l1_penalty(p, alpha, include_biases=False):
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    total = np.abs(p.w1).sum() + np.abs(p.w2).sum()
    if include_biases:
        total += np.abs(p.b1).sum() + np.abs(p.b2).sum()
    return float(alpha * total)


def soft_threshold(x, t):
    """Proximal map of ``t*|.|``: ``sign(x) * max(|x| - t, 0)``."""
    if t < 0:
        raise ValueError("threshold must be >= 0")
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def sgd_step(p, g, cfg):
    """One SGD update; returns new parameters and leaves ``p`` untouched."""
    out = {}
    for name, theta in p.blocks().items():
        grad = getattr(g, name)
        if grad.shape != theta.shape:
            raise ValueError(f"gradient shape {grad.shape} != parameter shape {theta.shape} for {name}")
        new = np.array(theta, dtype=np.float64, order="C")
        flat, gflat = new.reshape(-1), np.ascontiguousarray(grad, dtype=np.float64).reshape(-1)
        penalized = name in ("w1", "w2") or cfg.regularize_biases
        if penalized and cfg.l1_mode == "proximal":
            kernels.prox_update(flat, gflat, cfg.lr, cfg.lr * cfg.alpha)
        elif penalized:
            kernels.subgradient_update(flat, gflat, cfg.lr, cfg.alpha)
        else:
            flat -= cfg.lr * gflat
        out[name] = check_finite(new, f"sgd update of {name}")
    return MlpParams(**out)


def evaluate(p, train, test, cfg, epoch):
    train_logits, _ = forward(p, train.features)
    test_logits, _ = forward(p, test.features)
    sp = sparsity(p, cfg.eps_sparsity)
    return Snapshot(
        epoch=epoch,
        train_loss=loss_ce(train_logits, train.labels),
        train_penalty=l1_penalty(p, cfg.alpha, cfg.regularize_biases),
        test_loss=loss_ce(test_logits, test.labels),
        train_acc=accuracy(np.argmax(train_logits, axis=1), train.labels),
        test_acc=accuracy(np.argmax(test_logits, axis=1), test.labels),
        sparsity_w1=sp.w1,
        sparsity_w2=sp.w2,
        sparsity_all=sp.overall,
    )


def train(train, test, k, cfg):
    """Train a width-``k`` network; deterministic given datasets, ``k`` and ``cfg``.

    Every epoch reshuffles with a seeded Fisher-Yates permutation and
    trains on every minibatch, the trailing partial one included.
    Snapshots are taken at epoch 0, every ``eval_every`` epochs and at the
    final epoch. Raises :class:`DivergenceError` on non-finite values.
    """
    if train.d != test.d or train.num_classes != test.num_classes:
        raise ValueError("train and test sets must share input dimension and class count")
    params = init_params(train.d, k, train.num_classes, cfg.seed)
    shuffler = Prng(derive_seed(cfg.seed, _SHUFFLE_STREAM))
    history = TrainHistory([evaluate(params, train, test, cfg, 0)])
    x, y = train.features, train.labels
    for epoch in range(1, cfg.epochs + 1):
        order = shuffler.permutation(train.n)
        try:
            for start in range(0, train.n, cfg.batch_size):
                idx = order[start : start + cfg.batch_size]
                _, cache = forward(params, x[idx])
                params = sgd_step(params, backward(params, cache, y[idx]), cfg)
            if epoch % cfg.eval_every == 0 or epoch == cfg.epochs:
                snap = evaluate(params, train, test, cfg, epoch)
                if not all(math.isfinite(v) for v in (snap.train_loss, snap.test_loss, snap.train_penalty)):
                    raise NumericError("non-finite loss")
                history.snapshots.append(snap)
        except NumericError:
            raise DivergenceError(epoch, history, params) from None
    return params, history
