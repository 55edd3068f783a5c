"""Grid sweeps over (kernel dimension, alpha, seed) and their CSV persistence."""

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

from ..dataio import Dataset, load_mnist, subsample, synthetic_blobs
from ..linalg import derive_seed
from ..optim import DivergenceError, TrainConfig, train

CSV_HEADER = (
    "kernel_dim,alpha,seed,train_loss,test_loss,train_acc,test_acc,"
    "sparsity_w1,sparsity_w2,sparsity_all,epochs_run,diverged,wall_time_s"
)


class CsvFormatError(ValueError):
    pass


@dataclass(frozen=True)
class RunRecord:
    kernel_dim: int
    alpha: float
    seed: int
    train_loss: float
    test_loss: float
    train_acc: float
    test_acc: float
    sparsity_w1: float
    sparsity_w2: float
    sparsity_all: float
    epochs_run: int
    diverged: bool
    wall_time_s: float

    @property
    def test_error(self):
        return 1.0 - self.test_acc


def load_datasets(cfg):
    """Build the (train, test) pair named by a :class:`SweepConfig`."""
    if cfg.data_source == "synthetic":
        per_class = -(-(cfg.train_size + cfg.test_size) // cfg.synthetic_classes)
        full = synthetic_blobs(per_class, cfg.synthetic_classes, cfg.synthetic_dim,
                               cfg.synthetic_separation, cfg.data_seed)
        mixed = subsample(full, cfg.train_size + cfg.test_size, cfg.data_seed)
        train_ds = Dataset(mixed.features[: cfg.train_size], mixed.labels[: cfg.train_size], full.num_classes)
        test_ds = Dataset(mixed.features[cfg.train_size :], mixed.labels[cfg.train_size :], full.num_classes)
        return train_ds, test_ds
    train_full, test_full = load_mnist(cfg.data_dir)
    return (
        subsample(train_full, cfg.train_size, derive_seed(cfg.data_seed, 0)),
        subsample(test_full, cfg.test_size, derive_seed(cfg.data_seed, 1)),
    )


def run_seed(seed, k, alpha_index):
    return derive_seed(seed, k, alpha_index)


def _train_config(cfg, alpha, seed):
    return TrainConfig(
        alpha=alpha, lr=cfg.lr, batch_size=cfg.batch_size, epochs=cfg.epochs, seed=seed,
        l1_mode=cfg.l1_mode, regularize_biases=cfg.regularize_biases,
        eval_every=cfg.eval_every, eps_sparsity=cfg.eps_sparsity,
    )


def run_one(train_ds, test_ds, cfg, k, alpha_index, seed):
    alpha = cfg.alphas[alpha_index]
    tcfg = _train_config(cfg, alpha, run_seed(seed, k, alpha_index))
    t0 = time.perf_counter()
    try:
        _, history = train(train_ds, test_ds, k, tcfg)
        epochs_run, diverged = cfg.epochs, False
    except DivergenceError as err:
        history, epochs_run, diverged = err.history, err.epoch - 1, True
    wall = time.perf_counter() - t0 if cfg.record_wall_time else 0.0
    s = history.final
    return RunRecord(k, alpha, seed, s.train_loss, s.test_loss, s.train_acc, s.test_acc,
                     s.sparsity_w1, s.sparsity_w2, s.sparsity_all, epochs_run, diverged, wall)


_WORKER = {}


def _init_worker(train_ds, test_ds, cfg):
    _WORKER.update(train=train_ds, test=test_ds, cfg=cfg)


def _run_task(task):
    return run_one(_WORKER["train"], _WORKER["test"], _WORKER["cfg"], *task)


def run_sweep(cfg, datasets=None, workers=None, progress=None):
    """Train one network per (k, alpha, seed); records come back sorted.

    ``datasets`` overrides loading from ``cfg``. ``progress`` is called
    with each finished record.
    """
    cfg.validate()
    train_ds, test_ds = datasets if datasets is not None else load_datasets(cfg)
    tasks = [(k, ai, s) for k in cfg.kernel_dims for ai in range(len(cfg.alphas)) for s in cfg.seeds]
    workers = cfg.workers if workers is None else workers
    records = []
    if workers <= 1:
        for task in tasks:
            records.append(run_one(train_ds, test_ds, cfg, *task))
            if progress:
                progress(records[-1])
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(train_ds, test_ds, cfg)) as pool:
            for rec in pool.map(_run_task, tasks):
                records.append(rec)
                if progress:
                    progress(rec)
    return sorted(records, key=lambda r: (r.kernel_dim, r.alpha, r.seed))


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def records_to_csv(records):
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(",".join(_fmt(v) for v in astuple(r)) + "\n")
    return buf.getvalue()


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


def _parse_field(kind, text):
    if kind is bool:
        if text not in ("true", "false"):
            raise ValueError(f"expected true/false, got {text!r}")
        return text == "true"
    return kind(text)


def parse_csv(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CsvFormatError("line 1: header does not match the run-record schema")
    kinds = [f.type for f in fields(RunRecord)]
    records = []
    for lineno, row in enumerate(csv.reader(lines[1:]), 2):
        if not row:
            continue
        if len(row) != len(kinds):
            raise CsvFormatError(f"line {lineno}: expected {len(kinds)} fields, got {len(row)}")
        try:
            records.append(RunRecord(*(_parse_field(k, v) for k, v in zip(kinds, row))))
        except ValueError as exc:
            raise CsvFormatError(f"line {lineno}: {exc}") from None
    return records


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return parse_csv(fh.read())
