"""Reachability kernels: compiled extension when built, pure Python otherwise.

Backward-closure queries sit on the hot path of every metric and gate
decision (one closure per claim), so the BFS runs in a compiled extension
when available. Both backends share one contract and are benchmarked
against each other in benchmarks/bench_kernels.py.

Set CLAIMTRACE_PURE_PY=1 to force the pure-Python kernels.
"""

import os

from . import _reach_py

if os.environ.get("CLAIMTRACE_PURE_PY") == "1":
    _impl = _reach_py
    BACKEND = "python"
else:
    try:
        from . import _reach_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _reach_py
        BACKEND = "python"

closure = _impl.closure
reaches = _impl.reaches


def available_backends():
    """Name -> module for every importable backend (used by the benchmark)."""
    backends = {"python": _reach_py}
    try:
        from . import _reach_cy

        backends["cython"] = _reach_cy
    except ImportError:
        pass
    return backends
