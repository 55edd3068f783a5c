"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the
pure-Python fallback is imported. Setting ``DESCENT_LAB_PURE_PYTHON=1``
forces the fallback.
"""

import os

if os.environ.get("DESCENT_LAB_PURE_PYTHON", "") not in ("", "0"):
    from . import _fallback as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
pcg32_fill = _impl.pcg32_fill
pcg32_permutation = _impl.pcg32_permutation
prox_update = _impl.prox_update
subgradient_update = _impl.subgradient_update
cd_sweep = _impl.cd_sweep


def available_backends():
    """Return the importable kernel modules keyed by backend name."""
    from . import _fallback

    found = {"python": _fallback}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
