"""Self-contained SVG charts of sweep results (no plotting dependency)."""

import math
from collections import defaultdict
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 560, 360
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 55
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"]


class _Axes:
    def __init__(self, xs, ymin, ymax):
        self.lx0 = math.log10(min(xs))
        self.lx1 = math.log10(max(xs))
        if ymax <= ymin:
            ymax = ymin + 1.0
        self.y0, self.y1 = ymin, ymax

    def x(self, v):
        span = self.lx1 - self.lx0
        frac = 0.5 if span == 0 else (math.log10(v) - self.lx0) / span
        return LEFT + frac * (WIDTH - LEFT - RIGHT)

    def y(self, v):
        frac = (v - self.y0) / (self.y1 - self.y0)
        return HEIGHT - BOTTOM - frac * (HEIGHT - TOP - BOTTOM)


def _frame(ax, title, ylabel):
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for dec in range(math.floor(ax.lx0), math.ceil(ax.lx1) + 1):
        if ax.lx0 - 1e-9 <= dec <= ax.lx1 + 1e-9:
            px = ax.x(10.0**dec)
            parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
            parts.append(f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle">1e{dec}</text>')
    for i in range(6):
        v = ax.y0 + i * (ax.y1 - ax.y0) / 5
        py = ax.y(v)
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end">{v:.3g}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">alpha (L1 coefficient, log scale)</text>')
    parts.append(f'<text transform="translate(16 {(y0 + y1) / 2:.1f}) rotate(-90)" text-anchor="middle">{escape(ylabel)}</text>')
    return parts


def _series(ax, xs, ys, color, label=None):
    pts = " ".join(f"{ax.x(x):.4f},{ax.y(y):.4f}" for x, y in zip(xs, ys))
    attr = f' data-label="{escape(str(label))}"' if label is not None else ""
    return [f'<polyline class="mean-line"{attr} fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>']


def _legend(labels):
    parts = []
    for i, lab in enumerate(labels):
        y = TOP + 4 + 14 * i
        color = PALETTE[i % len(PALETTE)]
        parts.append(f'<rect x="{WIDTH - RIGHT - 70}" y="{y}" width="10" height="10" fill="{color}"/>')
        parts.append(f'<text x="{WIDTH - RIGHT - 55}" y="{y + 9}">{escape(lab)}</text>')
    return parts


def _group(records, value):
    """{k: (alphas, {seed: [values]})} with alphas sorted."""
    table = defaultdict(lambda: defaultdict(dict))
    for r in records:
        table[r.kernel_dim][r.seed][r.alpha] = value(r)
    out = {}
    for k, by_seed in sorted(table.items()):
        alphas = sorted({a for row in by_seed.values() for a in row})
        out[k] = (alphas, by_seed)
    return out


def _mean_curve(alphas, by_seed):
    return [float(np.mean([row[a] for row in by_seed.values() if a in row])) for a in alphas]


def _write(path, parts):
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
    return Path(path)


def emit_plots(records, out_dir):
    """Write per-k test-error panels, an all-k overlay and a sparsity chart.

    Returns the list of written paths.
    """
    if not records:
        raise ValueError("no records to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    err = _group(records, lambda r: 1.0 - r.test_acc)
    spars = _group(records, lambda r: r.sparsity_all)
    all_alphas = sorted({r.alpha for r in records})
    ymax = max(1.0 - r.test_acc for r in records)
    written = []

    for i, (k, (alphas, by_seed)) in enumerate(err.items()):
        ax = _Axes(alphas, 0.0, ymax * 1.05)
        parts = _frame(ax, f"Test error vs alpha, kernel dimension k={k}", "test error")
        color = PALETTE[i % len(PALETTE)]
        for seed, row in sorted(by_seed.items()):
            for a, v in sorted(row.items()):
                parts.append(
                    f'<circle class="seed-point" data-seed="{seed}" cx="{ax.x(a):.4f}" cy="{ax.y(v):.4f}" '
                    f'r="2.5" fill="{color}" fill-opacity="0.45"/>'
                )
        parts += _series(ax, alphas, _mean_curve(alphas, by_seed), color, f"k={k}")
        written.append(_write(out / f"test_error_k{k}.svg", parts))

    ax = _Axes(all_alphas, 0.0, ymax * 1.05)
    parts = _frame(ax, "Seed-averaged test error vs alpha, all kernel dimensions", "test error")
    for i, (k, (alphas, by_seed)) in enumerate(err.items()):
        parts += _series(ax, alphas, _mean_curve(alphas, by_seed), PALETTE[i % len(PALETTE)], f"k={k}")
    parts += _legend([f"k={k}" for k in err])
    written.append(_write(out / "test_error_overlay.svg", parts))

    ax = _Axes(all_alphas, 0.0, 1.0)
    parts = _frame(ax, "Weight sparsity vs alpha", "fraction of |w| <= eps")
    for i, (k, (alphas, by_seed)) in enumerate(spars.items()):
        parts += _series(ax, alphas, _mean_curve(alphas, by_seed), PALETTE[i % len(PALETTE)], f"k={k}")
    parts += _legend([f"k={k}" for k in spars])
    written.append(_write(out / "sparsity_vs_alpha.svg", parts))
    return written
