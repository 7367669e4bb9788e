"""Backend selection for the tabulated-set-function kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise, or
when ``PMSEARCH_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the pure-Python implementation is used. Both expose the same functions.
"""

import os

import numpy as np

from . import _kernels_py

_force_python = os.environ.get("PMSEARCH_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

BACKENDS = {"python": _kernels_py}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _table(table):
    return np.ascontiguousarray(table, dtype=np.float64)


def smi(table, n, l_mask, k, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    return impl.smi(_table(table), n, l_mask, k)


def submodular_violation(table, n, tol=0.0, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    return impl.submodular_violation(_table(table), n, tol)


def monotone_violation(table, n, tol=0.0, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    return impl.monotone_violation(_table(table), n, tol)
