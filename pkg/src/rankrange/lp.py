"""Two-phase primal simplex for small dense standard-form LPs.

    minimize c @ x  subject to  A_eq @ x = b_eq,  x >= 0

Bland's rule throughout, so the method cannot cycle. The pivot loop is one of
the compiled kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._kernels_py import _pivot

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded", "iteration_limit"
    x: np.ndarray | None
    objective: float | None
    phase1_objective: float


def simplex(c, A_eq, b_eq, *, feas_tol: float = FEAS_TOL, max_iter: int | None = None,
            backend=None) -> LPResult:
    impl = kernels.get_backend(backend)
    A = np.array(A_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = A.shape
    if b.size != m or c.size != n:
        raise ValueError("inconsistent LP dimensions")
    if max_iter is None:
        max_iter = 50 * (m + n) + 100

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    # phase 1: artificial basis, minimize the sum of artificials
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -A.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.intp)
    status, _ = impl.simplex_pivots(tab, basis, n + m, PIVOT_TOL, max_iter)
    if status == 2:
        return LPResult("iteration_limit", None, None, float("nan"))
    phase1 = -tab[m, -1]
    if phase1 > feas_tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        return LPResult("infeasible", None, None, float(phase1))

    # drive zero-level artificials out of the basis; drop redundant rows
    keep_rows = []
    for i in range(m):
        if basis[i] >= n:
            row = tab[i, :n]
            cols = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if cols.size == 0:
                continue
            _pivot(tab, i, int(cols[0]))
            basis[i] = cols[0]
        keep_rows.append(i)

    # phase 2 on the original objective
    t2 = np.zeros((len(keep_rows) + 1, n + 1))
    t2[:-1, :n] = tab[keep_rows, :n]
    t2[:-1, -1] = tab[keep_rows, -1]
    basis2 = np.ascontiguousarray(basis[keep_rows])
    t2[-1, :n] = c
    for i, j in enumerate(basis2):
        t2[-1] -= c[j] * t2[i]
    status, _ = impl.simplex_pivots(t2, basis2, n, PIVOT_TOL, max_iter)
    if status == 1:
        return LPResult("unbounded", None, None, float(phase1))
    if status == 2:
        return LPResult("iteration_limit", None, None, float(phase1))
    x = np.zeros(n)
    x[basis2] = t2[:-1, -1]
    x = np.clip(x, 0.0, None)
    return LPResult("optimal", x, float(c @ x), float(phase1))
