"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``FLOWFORGE_PURE=1`` before import to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("FLOWFORGE_PURE"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on build
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def backends():
    """Available implementations by name (used by tests and the benchmark)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
    except ImportError:  # pragma: no cover
        pass
    else:
        out["cython"] = compiled
    return out


def cut_scan(n, nbr_ptr, nbr_idx, threshold, half, impl=None):
    return (impl or _impl).cut_scan(n, nbr_ptr, nbr_idx, threshold, half)


def coset_scan(start, cyc_ptr, cyc_edge, cyc_neg, order, add, neg, diff, limit, stop_at=-1, impl=None):
    if not start:
        return 0, [], [1], 1, stop_at == 0
    return (impl or _impl).coset_scan(
        start, cyc_ptr, cyc_edge, cyc_neg, order, add, neg, diff, limit, stop_at
    )
