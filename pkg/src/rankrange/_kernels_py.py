"""Pure-Python (numpy) versions of the compiled kernels in ``_kernels.pyx``.

Both backends run the same sweep schedule and the same pivoting rule, so they
agree to rounding; neither is bitwise identical to the other.
"""

import numpy as np

BACKEND = "python"


def jacobi_sweeps(a, v, schedule, tol, max_sweeps):
    """Cyclic complex Jacobi on the Hermitian matrix ``a`` (modified in place).

    ``schedule`` has shape (rounds, pairs, 2); the pairs inside a round are
    disjoint, so one round is applied as a single vectorized update. ``v``
    accumulates the rotations. Returns ``(sweeps, max_offdiag)``.
    """
    n = a.shape[0]
    if n < 2:
        return 0, 0.0
    rounds = [(r[:, 0].copy(), r[:, 1].copy()) for r in schedule]
    off = _max_offdiag(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        for p, q in rounds:
            apq = a[p, q]
            b = np.abs(apq)
            live = b > 0.0
            if not live.any():
                continue
            p, q, apq, b = p[live], q[live], apq[live], b[live]
            app = a[p, p].real
            aqq = a[q, q].real
            phase = apq / b  # e^{i phi}
            tau = (aqq - app) / (2.0 * b)
            t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            se = s * np.conj(phase)  # s e^{-i phi}
            ce = c * np.conj(phase)  # c e^{-i phi}

            cp = a[:, p].copy()
            cq = a[:, q]
            a[:, p] = cp * c - cq * se
            a[:, q] = cp * s + cq * ce
            rp = a[p, :].copy()
            rq = a[q, :]
            a[p, :] = c[:, None] * rp - np.conj(se)[:, None] * rq
            a[q, :] = s[:, None] * rp + np.conj(ce)[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * b
            a[q, q] = aqq + t * b

            vp = v[:, p].copy()
            vq = v[:, q]
            v[:, p] = vp * c - vq * se
            v[:, q] = vp * s + vq * ce
        sweeps += 1
        off = _max_offdiag(a)
    return sweeps, float(off)


def _max_offdiag(a):
    n = a.shape[0]
    mags = np.abs(a)
    mags[np.diag_indices(n)] = 0.0
    return float(mags.max()) if n > 1 else 0.0


def simplex_pivots(tab, basis, ncols, tol, max_iter):
    """Primal simplex pivots with Bland's rule on a dense tableau (in place).

    Rows ``0..m-1`` are constraints, the last row holds reduced costs and the
    last column the right-hand side. Only columns ``< ncols`` may enter.
    Returns ``(status, iterations)``: 0 optimal, 1 unbounded, 2 iteration cap.
    """
    m = tab.shape[0] - 1
    for it in range(max_iter):
        cost = tab[m, :ncols]
        candidates = np.flatnonzero(cost < -tol)
        if candidates.size == 0:
            return 0, it
        col = int(candidates[0])
        column = tab[:m, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            return 1, it
        ratios = tab[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(tab, row, col)
        basis[row] = col
    return 2, max_iter


def _pivot(tab, row, col):
    tab[row, :] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row, :])
