"""Sparse double descent laboratory.

Two-layer ReLU networks trained with L1-regularized SGD, a LASSO baseline
on frozen random ReLU features, and tools to sweep, persist and analyze
test error along the regularization axis.
"""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
