"""Numeric kernels, compiled when the extension is built.

Set ``FRACZETA_PURE_PYTHON=1`` to force the pure-Python implementations.
"""
import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("FRACZETA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def dirichlet_sum(log_lengths, mults, s: complex, impl=None) -> complex:
    impl = impl or _impl
    return complex(impl.dirichlet_sum(_f64(log_lengths), _f64(mults), s.real, s.imag))


def log_binomials(k1: int, k2: int, n_terms: int, impl=None) -> np.ndarray:
    impl = impl or _impl
    return np.asarray(impl.log_binomials(int(k1), int(k2), int(n_terms)), dtype=np.float64)


def partition_log_sum(log_coeffs, k2: int, s: float, log_base: float, impl=None) -> float:
    impl = impl or _impl
    return float(impl.partition_log_sum(_f64(log_coeffs), int(k2), float(s), float(log_base)))
