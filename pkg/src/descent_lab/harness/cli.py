"""``descent-lab`` command-line interface.

Exit codes: 0 success, 1 user error (bad flags, config, missing data),
2 internal error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .. import kernels
from ..dataio import DATA_ENV, IdxError, resolve_data_dir
from ..lasso import lambda_max, one_vs_rest_path, random_relu_features, standardize
from ..linalg import derive_seed
from ..model import save_checkpoint
from ..optim import L1_MODES, DivergenceError, TrainConfig, train
from .config import ConfigError, SweepConfig, load_config
from .plots import emit_plots
from .report import report
from .sweep import CsvFormatError, load_datasets, read_csv, run_sweep, write_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _data_flags(p):
    p.add_argument("--data-dir", help="directory with MNIST IDX files (default: $DESCENT_LAB_DATA or ./data/mnist)")
    p.add_argument("--synthetic", action="store_true", help="use synthetic Gaussian blobs instead of MNIST")
    p.add_argument("--train-size", type=int, default=5000)
    p.add_argument("--test-size", type=int, default=1000)
    p.add_argument("--data-seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="descent-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("train", help="train one network")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--kernel-dim", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--l1-mode", choices=L1_MODES, default="proximal")
    p.add_argument("--eval-every", type=int, default=10)
    p.add_argument("--out", help="write the final parameters as an MLP1 checkpoint")
    _data_flags(p)

    p = sub.add_parser("sweep", help="run a (kernel_dim, alpha, seed) grid")
    p.add_argument("--config", help="key = value config file (defaults when omitted)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("lasso", help="LASSO path on random ReLU features")
    p.add_argument("--kernel-dim", type=int, default=100)
    p.add_argument("--lambdas", help="comma-separated, strictly descending (default: 12-point log grid)")
    p.add_argument("--seed", type=int, default=0)
    _data_flags(p)

    p = sub.add_parser("plot", help="emit SVG charts from a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("report", help="analyze a sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--g", type=int, default=1, help="grid steps allowed between per-k minima")

    sub.add_parser("selftest", help="run the brute-force oracle checks")
    return parser


def _datasets(args):
    cfg = SweepConfig(
        train_size=args.train_size, test_size=args.test_size, data_seed=args.data_seed,
        data_source="synthetic" if args.synthetic else "mnist-dir", data_dir=args.data_dir,
    ).validate()
    return load_datasets(cfg)


def cmd_train(args):
    train_ds, test_ds = _datasets(args)
    cfg = TrainConfig(alpha=args.alpha, lr=args.lr, batch_size=args.batch_size, epochs=args.epochs,
                      seed=args.seed, l1_mode=args.l1_mode, eval_every=args.eval_every)
    try:
        params, hist = train(train_ds, test_ds, args.kernel_dim, cfg)
    except DivergenceError as err:
        print(f"diverged at epoch {err.epoch}")
        params, hist = err.params, err.history
    print("epoch  train_loss  penalty     test_loss  train_acc  test_acc  sparsity")
    for s in hist.snapshots:
        print(f"{s.epoch:5d}  {s.train_loss:10.5f}  {s.train_penalty:10.5f}  {s.test_loss:9.5f}  "
              f"{s.train_acc:9.4f}  {s.test_acc:8.4f}  {s.sparsity_all:8.4f}")
    if args.out:
        save_checkpoint(params, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config) if args.config else SweepConfig().validate()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    total = len(cfg.kernel_dims) * len(cfg.alphas) * len(cfg.seeds)
    done = [0]

    def progress(r):
        done[0] += 1
        if not args.quiet:
            print(f"[{done[0]}/{total}] k={r.kernel_dim} alpha={r.alpha:.3g} seed={r.seed} "
                  f"test_acc={r.test_acc:.4f} sparsity={r.sparsity_all:.3f}{' DIVERGED' if r.diverged else ''}",
                  flush=True)

    records = run_sweep(cfg, workers=args.workers, progress=progress)
    write_csv(records, out / "results.csv")
    print(f"wrote {out / 'results.csv'} ({len(records)} runs, kernels backend: {kernels.BACKEND})")
    return 0


def cmd_lasso(args):
    train_ds, test_ds = _datasets(args)
    seed = derive_seed(args.seed, args.kernel_dim)
    ftr = random_relu_features(train_ds.features, args.kernel_dim, seed)
    fte = random_relu_features(test_ds.features, args.kernel_dim, seed)
    if args.lambdas:
        try:
            lambdas = [float(v) for v in args.lambdas.split(",")]
        except ValueError:
            raise UsageError(f"--lambdas: not a comma-separated list of numbers: {args.lambdas!r}") from None
        if any(b >= a for a, b in zip(lambdas, lambdas[1:])):
            raise UsageError("--lambdas: must be strictly descending")
    else:
        xs, _, _ = standardize(ftr)
        targets = (np.where(train_ds.labels == c, 1.0, -1.0) for c in range(train_ds.num_classes))
        top = max(lambda_max(xs, t - t.mean()) for t in targets)
        lambdas = list(np.geomspace(top, top * 1e-3, 12))
    points = one_vs_rest_path(ftr, train_ds.labels, fte, test_ds.labels, train_ds.num_classes, lambdas)
    total = args.kernel_dim * train_ds.num_classes
    print(f"LASSO one-vs-rest on {args.kernel_dim} random ReLU features ({total} coefficients)")
    print("lambda        support  train_acc  test_acc  converged")
    for pt in points:
        print(f"{pt.lam:12.6g}  {pt.support_size:7d}  {pt.train_acc:9.4f}  {pt.test_acc:8.4f}  {str(pt.converged).lower()}")
    return 0


def cmd_plot(args):
    for path in emit_plots(read_csv(args.csv), args.out_dir):
        print(path)
    return 0


def cmd_report(args):
    records = read_csv(args.csv)
    if not records:
        raise UsageError(f"{args.csv}: no records")
    sys.stdout.write(report(records, args.g))
    return 0


def cmd_selftest(args):
    from .. import selftest

    print(f"kernels backend: {kernels.BACKEND}")
    return 2 if selftest.run() else 0


COMMANDS = {
    "train": cmd_train, "sweep": cmd_sweep, "lasso": cmd_lasso,
    "plot": cmd_plot, "report": cmd_report, "selftest": cmd_selftest,
}

USER_ERRORS = (UsageError, ConfigError, CsvFormatError, IdxError, FileNotFoundError, ValueError)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except USER_ERRORS as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        if isinstance(exc, FileNotFoundError):
            print(f"hint: pass --data-dir or set {DATA_ENV} (currently {resolve_data_dir()})",
                  file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
