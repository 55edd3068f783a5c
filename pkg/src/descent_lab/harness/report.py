"""Text report of double-descent structure across kernel dimensions."""

from collections import defaultdict

import numpy as np

from ..metrics import Curve, CurveTooShort, argmin_alpha, find_extrema, minima_alignment, noise_tol_from_seeds


def _fmt(v):
    return format(v, ".6g")


def _bool(v):
    return "true" if v else "false"


def curves_by_kernel(records, value=lambda r: 1.0 - r.test_acc):
    """Seed-averaged curves per kernel dimension.

    Returns ``{k: (Curve, per_seed_array)}``; the per-seed array is
    ``seeds x alphas`` and only covers seeds present at every alpha.
    """
    table = defaultdict(lambda: defaultdict(dict))
    for r in records:
        table[r.kernel_dim][r.alpha][r.seed] = value(r)
    out = {}
    for k, by_alpha in sorted(table.items()):
        alphas = sorted(by_alpha)
        mean = [float(np.mean(list(by_alpha[a].values()))) for a in alphas]
        common = sorted(set.intersection(*(set(by_alpha[a]) for a in alphas)))
        per_seed = np.array([[by_alpha[a][s] for a in alphas] for s in common])
        out[k] = (Curve(alphas, mean), per_seed)
    return out


def report(records, g=1):
    """Render the analysis; the trailer after ``[summary]`` is ``key=value`` lines."""
    if not records:
        raise ValueError("no records")
    curves = curves_by_kernel(records)
    spars = curves_by_kernel(records, lambda r: r.sparsity_all)
    lines = ["Sparse double descent analysis (test error vs alpha, seed-averaged)", ""]
    trailer = [f"runs={len(records)}", f"diverged_runs={sum(r.diverged for r in records)}"]
    for k, (curve, per_seed) in curves.items():
        tol = noise_tol_from_seeds(per_seed)
        sp = spars[k][0].ys
        best = argmin_alpha(curve)
        head = f"k={k}: points={len(curve)} seeds={per_seed.shape[0]} noise_tol={_fmt(tol)}"
        trailer += [
            f"k{k}.points={len(curve)}",
            f"k{k}.noise_tol={_fmt(tol)}",
            f"k{k}.argmin_alpha={_fmt(best)}",
            f"k{k}.min_test_error={_fmt(min(curve.ys))}",
            f"k{k}.sparsity_at_min_alpha={_fmt(sp[0])}",
            f"k{k}.sparsity_at_max_alpha={_fmt(sp[-1])}",
        ]
        try:
            ext = find_extrema(curve, tol)
        except CurveTooShort:
            lines.append(f"{head} status=curve_too_short argmin_alpha={_fmt(best)}")
            trailer.append(f"k{k}.status=curve_too_short")
            continue
        minima = ",".join(_fmt(curve.xs[i]) for i in ext.minima) or "-"
        maxima = ",".join(_fmt(curve.xs[i]) for i in ext.maxima) or "-"
        lines.append(
            f"{head} double_descent={_bool(ext.double_descent)} descents={ext.descent_count} "
            f"ascents={ext.ascent_count} minima_alpha=[{minima}] maxima_alpha=[{maxima}] "
            f"argmin_alpha={_fmt(best)} min_test_error={_fmt(min(curve.ys))}"
        )
        trailer += [
            f"k{k}.status=ok",
            f"k{k}.double_descent={_bool(ext.double_descent)}",
            f"k{k}.descent_count={ext.descent_count}",
            f"k{k}.ascent_count={ext.ascent_count}",
        ]
    lines.append("")
    try:
        al = minima_alignment({k: c for k, (c, _) in curves.items()}, g)
    except ValueError as exc:
        lines.append(f"minima alignment: not computable ({exc})")
        trailer.append("minima_aligned=unknown")
    else:
        per_k = " ".join(f"k={k}:{_fmt(a)}" for k, a in al.argmin_alpha.items())
        lines.append(f"minima alignment (g={g}): argmin alpha {per_k}; spread={al.spread} grid steps; "
                     f"aligned={_bool(al.aligned)}")
        trailer += [f"minima_alignment_g={g}", f"minima_spread={al.spread}", f"minima_aligned={_bool(al.aligned)}"]
    return "\n".join(lines + ["", "[summary]"] + trailer) + "\n"


def parse_trailer(text):
    """Extract the ``key=value`` pairs after the ``[summary]`` marker."""
    _, _, tail = text.partition("[summary]\n")
    return dict(line.split("=", 1) for line in tail.splitlines() if "=" in line)
