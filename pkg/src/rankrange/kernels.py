"""Backend selection for the hot kernels.

The compiled extension is used when it imports; set ``RANKRANGE_PURE=1`` to
force the numpy fallback. Both backends expose ``jacobi_sweeps`` and
``simplex_pivots`` with identical signatures.
"""

import functools
import os

import numpy as np

from . import _kernels_py

if os.environ.get("RANKRANGE_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND


def get_backend(name=None):
    """Return a kernel module by name ("cython" or "python"); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


@functools.lru_cache(maxsize=64)
def jacobi_schedule(n):
    """Round-robin pair schedule for a cyclic Jacobi sweep on an n x n matrix.

    Shape (rounds, pairs, 2) with p < q in every pair; pairs within one round
    touch disjoint indices. Odd n gets a phantom index whose pairs are dropped.
    """
    if n < 2:
        return np.zeros((0, 0, 2), dtype=np.intp)
    size = n + (n % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        pairs.sort()
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    out = np.array(rounds, dtype=np.intp)
    out.setflags(write=False)
    return out


jacobi_sweeps = _impl.jacobi_sweeps
simplex_pivots = _impl.simplex_pivots
