"""Kernel selection.

The compiled ``_kernels`` extension is used when importable; otherwise the
NumPy fallback. Set ``REGIMEKIT_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from regimekit import _fallback

_compiled = None
if os.environ.get("REGIMEKIT_PURE_PYTHON") != "1":
    try:
        from regimekit import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def available():
    """Names of the kernel backends importable in this environment."""
    return ["cython", "python"] if _compiled is not None else ["python"]


def get(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = name or BACKEND
    if name == "python":
        return _fallback
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def _f64(a, ndim):
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {a.shape}")
    return a


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int_)


def pairwise_dct(X, lam, backend=None):
    return get(backend).pairwise_dct(_f64(X, 2), float(lam))


def lloyd(X, init, max_iter, backend=None):
    return get(backend).lloyd(_f64(X, 2), np.array(init, dtype=np.float64, order="C"), int(max_iter))


def garch11_filter(e, omega, alpha, beta, h1, backend=None):
    return get(backend).garch11_filter(_f64(e, 1), float(omega), float(alpha), float(beta), float(h1))


def garch11_loglik(e, omega, alpha, beta, h1, backend=None):
    return float(get(backend).garch11_loglik(_f64(e, 1), float(omega), float(alpha), float(beta), float(h1)))


def majority_vote(codes, h, n_codes, backend=None):
    return get(backend).majority_vote(_i64(codes), int(h), int(n_codes))


def silhouette_values(D, labels, k, backend=None):
    return get(backend).silhouette_values(_f64(D, 2), _i64(labels), int(k))
