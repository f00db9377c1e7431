"""Membership certificates for the joint rank-k numerical range.

A point ``a`` lies in the rank-k range of ``A = (A_1, ..., A_m)`` when some
n x k isometry ``U`` satisfies ``U* A_j U = a_j I_k`` for every j. Everything
here either checks such a witness, searches for one, or transports one along
the algebraic covariances of the range (linear maps, translations,
coordinate drops, rank shrinking, compressions).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, DimensionError
from .linalg import (
    HermitianTuple,
    as_hermitian,
    check_isometry,
    compress,
    herm_eig,
    orthonormalize,
    qr_isometry,
    random_isometry,
    symmetrize,
)

VERIFY_TOL = 1e-8
OPTIMIZER_TOL = 1e-10
RANK_TOL = 1e-8
ANGLE_TOL = 1e-10

ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
GRAD_TOL = 1e-12
STALL_TOL = 1e-12  # relative decrease counted as no progress
STALL_ITERS = 5
MAX_ITERS = 500
RESTARTS = 50
FREE_WEIGHT = 10.0
CHUNK = 10


@dataclass(frozen=True)
class RangeCertificate:
    """A point together with the isometry witnessing it and the witness residual.

    ``residual = sqrt(sum_j ||U* A_j U - a_j I||_F^2)`` for the tuple it was
    computed against; ``accepted`` records ``residual <= tol``.
    """

    point: np.ndarray
    witness: np.ndarray
    residual: float
    accepted: bool = True
    tol: float = VERIFY_TOL

    @property
    def k(self) -> int:
        return self.witness.shape[1]

    @property
    def m(self) -> int:
        return self.point.shape[0]


@dataclass(frozen=True)
class RealTransform:
    """Real m x p matrix (and optional offset) acting on points as ``a @ matrix``."""

    matrix: np.ndarray
    offset: np.ndarray | None = None

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if not np.all(np.isfinite(T)):
            raise ValueError("transform has non-finite entries")
        object.__setattr__(self, "matrix", T)
        if self.offset is not None:
            object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))

    def apply(self, point) -> np.ndarray:
        out = np.asarray(point, dtype=float) @ self.matrix
        return out if self.offset is None else out - self.offset


def _compressions(A: HermitianTuple, U: np.ndarray) -> np.ndarray:
    return symmetrize(U.conj().T @ A.stack @ U)


def witness_residual(A: HermitianTuple, U, point) -> float:
    """``sqrt(sum_j ||U* A_j U - a_j I_k||_F^2)`` computed directly."""
    U = np.asarray(U)
    C = _compressions(A, U)
    k = U.shape[1]
    D = C - np.asarray(point, dtype=float)[:, None, None] * np.eye(k)
    return float(np.sqrt(np.sum(np.abs(D) ** 2)))


def verify_point(A: HermitianTuple, U, tol: float = VERIFY_TOL, point=None) -> RangeCertificate:
    """Check an isometry as a rank-k witness.

    Without ``point`` the certified point is ``a_j = tr(U* A_j U) / k``; with
    it, the residual is measured against the given point instead.
    """
    U = check_isometry(U)
    if U.shape[0] != A.n:
        raise DimensionError(f"isometry has {U.shape[0]} rows, tuple dimension is {A.n}")
    k = U.shape[1]
    C = _compressions(A, U)
    if point is None:
        a = np.trace(C, axis1=1, axis2=2).real / k
    else:
        a = np.asarray(point, dtype=float).copy()
        if a.shape != (A.m,):
            raise DimensionError(f"point has length {a.size}, tuple has {A.m} matrices")
    D = C - a[:, None, None] * np.eye(k)
    residual = float(np.sqrt(np.sum(np.abs(D) ** 2)))
    return RangeCertificate(a, U, residual, residual <= tol, tol)


# ---------------------------------------------------------------------------
# numerical search


@dataclass
class SolveResult:
    """Outcome of ``membership_solve``; failure is a value, never a proof of absence."""

    success: bool
    certificate: RangeCertificate
    best_residual: float
    restarts_run: int
    residuals: np.ndarray = field(repr=False)

    @property
    def point(self) -> np.ndarray:
        return self.certificate.point


def _objective(stack, U, target, free, weight):
    """Batched objective, witness residual and Euclidean gradient.

    ``U`` has shape (R, n, k). In fixed mode the scalars are ``target``; in
    free mode they are ``tr(U* A_j U) / k`` and ``weight`` pulls them toward
    ``target`` when one is given.
    """
    k = U.shape[-1]
    AU = stack[None] @ U[:, None]  # (R, m, n, k)
    C = U.conj().transpose(0, 2, 1)[:, None] @ AU
    C = (C + C.conj().swapaxes(-1, -2)) / 2
    tr = np.trace(C, axis1=-2, axis2=-1).real / k  # (R, m)
    scalars = tr if free else np.broadcast_to(target, tr.shape)
    M = C - scalars[..., None, None] * np.eye(k)
    core = np.sum(np.abs(M) ** 2, axis=(1, 2, 3))
    G = 4.0 * np.sum(AU @ M, axis=1)
    f = core
    if free and target is not None and weight > 0:
        gap = tr - target
        f = core + weight * np.sum(gap**2, axis=1)
        G = G + (4.0 * weight / k) * np.einsum("rj,rjak->rak", gap, AU)
    return f, np.sqrt(core), G


def _riemannian(U, G):
    UhG = U.conj().transpose(0, 2, 1) @ G
    return G - U @ ((UhG + UhG.conj().transpose(0, 2, 1)) / 2)


def _inner(X, Y):
    return np.einsum("rak,rak->r", X.conj(), Y).real


def _descend(stack, U, target, free, weight, max_iters, stop_residual):
    """Riemannian gradient descent with QR retraction and Armijo backtracking.

    Every restart in the batch evolves independently of the others, so the
    outcome of restart i does not depend on how restarts are batched. A
    ``stop_residual`` of None runs to the gradient tolerance. A restart also
    stops after ``STALL_ITERS`` consecutive steps of negligible relative
    progress, which is how it ends at a positive local minimum.
    """
    if stop_residual is None:
        stop_residual = -np.inf
    f, res, G = _objective(stack, U, target, free, weight)
    xi = _riemannian(U, G)
    gn2 = _inner(xi, xi)
    step = 1.0 / np.maximum(np.sqrt(gn2), 1.0)
    active = (np.sqrt(gn2) > GRAD_TOL) & (res > stop_residual)
    prev_U = prev_xi = None
    stalls = np.zeros(U.shape[0], dtype=int)
    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        if prev_U is not None:
            dU = U[idx] - prev_U[idx]
            dxi = xi[idx] - prev_xi[idx]
            denom = np.abs(_inner(dU, dxi))
            bb = np.where(denom > 0, _inner(dU, dU) / np.where(denom > 0, denom, 1.0), step[idx])
            step[idx] = np.clip(bb, 1e-10, 1e4)
        prev_U, prev_xi = U.copy(), xi.copy()

        s = step[idx].copy()
        pending = np.ones(idx.size, dtype=bool)
        newU = U[idx].copy()
        newf = f[idx].copy()
        for _ in range(60):
            if not pending.any():
                break
            j = np.flatnonzero(pending)
            r = idx[j]
            trial = qr_isometry(U[r] - s[j, None, None] * xi[r])
            ft, _, _ = _objective(stack, trial, target, free, weight)
            ok = ft <= f[r] - ARMIJO_C * s[j] * gn2[r]
            newU[j[ok]] = trial[ok]
            newf[j[ok]] = ft[ok]
            pending[j[ok]] = False
            s[j[~ok]] *= ARMIJO_SHRINK
        # a restart whose line search fails entirely has stalled
        stalled = idx[pending]
        moved = ~pending
        U[idx[moved]] = newU[moved]
        step[idx] = s
        r = idx[moved]
        if r.size:
            f_r, res_r, G_r = _objective(stack, U[r], target, free, weight)
            flat = f[r] - f_r <= STALL_TOL * np.abs(f[r])
            stalls[r] = np.where(flat, stalls[r] + 1, 0)
            f[r], res[r] = f_r, res_r
            xi[r] = _riemannian(U[r], G_r)
            gn2[r] = _inner(xi[r], xi[r])
        active[stalled] = False
        active &= (np.sqrt(gn2) > GRAD_TOL) & (res > stop_residual) & (stalls < STALL_ITERS)
    return U, f, res


def _initial_batch(n, k, seed, start, count):
    return np.stack([random_isometry(np.random.default_rng([seed, i]), n, k) for i in range(start, start + count)])


def _run_restarts(A, k, target, free, weight, max_iters, tol, seed, start, count):
    U0 = _initial_batch(A.n, k, seed, start, count)
    stop = tol * 1e-2
    if free and target is not None and weight > 0:
        U0, _, _ = _descend(A.stack, U0, target, True, weight, max_iters // 2, None)
        U, _, res = _descend(A.stack, U0, None, True, 0.0, max_iters - max_iters // 2, stop)
    else:
        U, _, res = _descend(A.stack, U0, target, free, weight, max_iters, stop)
    return U, res


def membership_solve(
    A: HermitianTuple,
    target=None,
    k: int = 1,
    *,
    free: bool = False,
    restarts: int = RESTARTS,
    max_iters: int = MAX_ITERS,
    tol: float = OPTIMIZER_TOL,
    seed: int = 0,
    weight: float = FREE_WEIGHT,
    workers: int = 1,
    chunk: int = CHUNK,
) -> SolveResult:
    """Search for a rank-k witness by multi-start descent on the isometry manifold.

    Fixed mode (default) minimizes ``sum_j ||U* A_j U - a_j I||_F^2`` for the
    given ``target``. Free mode (``free=True``) lets the scalars follow
    ``tr(U* A_j U) / k`` and, if ``target`` is given, penalizes distance to it
    with ``weight`` before a final unpenalized polish.

    Restarts run in fixed-size chunks; the search stops after the first chunk
    containing a success. The best restart (lowest residual, lowest index on
    ties) is returned, so the result does not depend on ``workers``.
    """
    if not 1 <= k <= A.n:
        raise DimensionError(f"k={k} must lie in 1..{A.n}")
    if target is not None:
        target = np.asarray(target, dtype=float)
        if target.shape != (A.m,):
            raise DimensionError(f"target has length {target.size}, tuple has {A.m} matrices")
    elif not free:
        raise ValueError("fixed-target mode needs a target point")

    starts = list(range(0, restarts, chunk))
    counts = [min(chunk, restarts - s) for s in starts]
    Us, residuals = [], []

    def job(i):
        return _run_restarts(A, k, target, free, weight, max_iters, tol, seed, starts[i], counts[i])

    wave = max(1, int(workers))
    pool = ThreadPoolExecutor(wave) if wave > 1 else None
    try:
        for lo in range(0, len(starts), wave):
            ids = range(lo, min(lo + wave, len(starts)))
            results = list(pool.map(job, ids)) if pool else [job(i) for i in ids]
            done = False
            for U, res in results:
                Us.append(U)
                residuals.append(res)
                if (res <= tol).any():
                    done = True
                    break
            if done:
                break
    finally:
        if pool:
            pool.shutdown()

    U_all = np.concatenate(Us)
    res_all = np.concatenate(residuals)
    best = int(np.argmin(res_all))
    U_best = qr_isometry(U_all[best])
    cert = verify_point(A, U_best, tol, point=None if free else target)
    return SolveResult(bool(cert.residual <= tol), cert, float(cert.residual), int(res_all.size), res_all)


def free_samples(A: HermitianTuple, k: int, count: int, seed: int, *, tol: float = VERIFY_TOL,
                 max_iters: int = MAX_ITERS) -> list[RangeCertificate]:
    """Run ``count`` independent free-mode descents and keep every verified witness."""
    out = []
    for start in range(0, count, CHUNK):
        n_here = min(CHUNK, count - start)
        U, res = _run_restarts(A, k, None, True, 0.0, max_iters, tol * 1e-2, seed, start, n_here)
        for i in range(n_here):
            if res[i] <= tol:
                cert = verify_point(A, qr_isometry(U[i]), tol)
                if cert.accepted:
                    out.append(cert)
    return out


# ---------------------------------------------------------------------------
# single matrix: the rank-k range is an interval


@dataclass(frozen=True)
class Interval:
    """Rank-k range of one Hermitian matrix: ``[lo, hi]`` or empty."""

    lo: float | None
    hi: float | None
    k: int
    witnesses: dict = field(default_factory=dict, repr=False)

    @property
    def empty(self) -> bool:
        return self.lo is None

    def as_list(self):
        return None if self.empty else [self.lo, self.hi]


def _interval_witness(values, vectors, k, c, eq_tol):
    """k orthonormal vectors u with u* A u = c, built from eigenpairs.

    Eigenvectors at eigenvalue c are used as they are; the remaining ones come
    from 2x2 rotations pairing an eigenvector below c with one above c.
    """
    below = [i for i in range(values.size) if values[i] < c - eq_tol]
    above = [i for i in range(values.size) if values[i] > c + eq_tol][::-1]
    equal = [i for i in range(values.size) if abs(values[i] - c) <= eq_tol]
    cols = [vectors[:, i] for i in equal[:k]]
    for lo_i, hi_i in zip(below, above):
        if len(cols) == k:
            break
        lam_lo, lam_hi = values[lo_i], values[hi_i]
        w = (lam_hi - c) / (lam_hi - lam_lo)
        cols.append(np.sqrt(w) * vectors[:, lo_i] + np.sqrt(1.0 - w) * vectors[:, hi_i])
    if len(cols) < k:
        raise DegeneracyError(f"could only build {len(cols)} of {k} witness vectors", len(cols), k)
    return np.column_stack(cols)


def single_matrix_interval(A1, k: int) -> Interval:
    """Rank-k range of a single Hermitian matrix with constructive witnesses.

    With eigenvalues ascending ``l_1 <= ... <= l_n`` the range is
    ``[l_k, l_{n-k+1}]`` when ``l_k <= l_{n-k+1}`` and empty otherwise.
    Witnesses are returned for both endpoints and the midpoint.
    """
    A1 = as_hermitian(A1)
    n = A1.shape[0]
    if not 1 <= k <= n:
        raise DimensionError(f"k={k} must lie in 1..{n}")
    values, vectors = herm_eig(A1)
    lo, hi = float(values[k - 1]), float(values[n - k])
    eq_tol = 1e-10 * max(1.0, float(np.abs(values).max()))
    if lo > hi + eq_tol:
        return Interval(None, None, k)
    if lo > hi:
        lo = hi = (lo + hi) / 2
    witnesses = {
        name: _interval_witness(values, vectors, k, c, eq_tol)
        for name, c in (("lo", lo), ("mid", (lo + hi) / 2), ("hi", hi))
    }
    return Interval(lo, hi, k, witnesses)


SWEEP_OFFSETS = (1.0, 0.25, 0.05)
SWEEP_WEIGHTS = (1e2, 1e4)
SWEEP_ROUNDS = 8


def extremal_sweep(A1, k: int, *, restarts: int = 8, tol: float = 1e-9, seed: int = 0,
                   max_iters: int = MAX_ITERS):
    """Locate the rank-k interval of one matrix using only ``membership_solve``.

    A free-mode solve supplies an interior point. Toward each end, free-mode
    solves are penalized toward targets past the current extreme (offsets
    relative to ``||A1||_F``); the unpenalized polish then slides each one
    onto a certified point, typically the boundary itself. Rounds repeat
    from the most extreme certified point until they stop making progress.
    Returns ``(lo, hi)`` or None when no interior point is found.
    """
    A = HermitianTuple([A1])
    start = membership_solve(A, k=k, free=True, restarts=restarts, tol=tol, seed=seed, max_iters=max_iters)
    if not start.success:
        return None
    c0 = float(start.point[0])
    scale = max(float(np.linalg.norm(A.stack[0])), 1e-12)
    ends = []
    for direction in (-1.0, 1.0):
        best = c0
        salt = 0
        for _ in range(SWEEP_ROUNDS):
            anchor = best
            for f in SWEEP_OFFSETS:
                for w in SWEEP_WEIGHTS:  # a stronger pull only if the weaker one failed
                    salt += 1
                    res = membership_solve(A, [anchor + direction * f * scale], k, free=True, weight=w,
                                           restarts=restarts, tol=tol, seed=seed + salt, max_iters=max_iters)
                    if res.success:
                        if direction * (res.point[0] - best) > 0:
                            best = float(res.point[0])
                        break
            if direction * (best - anchor) <= 1e-13 * scale:
                break
        ends.append(best)
    return ends[0], ends[1]


# ---------------------------------------------------------------------------
# covariances


def transform_tuple(A: HermitianTuple, T: RealTransform) -> HermitianTuple:
    """``B_j = sum_i T_ij A_i``; a point ``a`` of A maps to ``a @ T`` for B."""
    M = T.matrix
    if M.shape[0] != A.m:
        raise DimensionError(f"transform has {M.shape[0]} rows, tuple has {A.m} matrices")
    return HermitianTuple._trusted(np.tensordot(M.T, A.stack, axes=1))


def transport_certificate(B: HermitianTuple, cert: RangeCertificate, T: RealTransform,
                          tol: float | None = None) -> RangeCertificate:
    """Re-verify ``(a @ T, U)`` against the transformed tuple ``B``."""
    return verify_point(B, cert.witness, cert.tol if tol is None else tol, point=cert.point @ T.matrix)


def translate_tuple(A: HermitianTuple, mu) -> HermitianTuple:
    """``(A_j - mu_j I)``; the range shifts by ``-mu``."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (A.m,):
        raise DimensionError(f"shift has length {mu.size}, tuple has {A.m} matrices")
    return HermitianTuple._trusted(A.stack - mu[:, None, None] * np.eye(A.n))


def translate_certificate(A: HermitianTuple, cert: RangeCertificate, mu) -> RangeCertificate:
    """The same witness, certifying ``a - mu`` for the translated tuple."""
    shifted = translate_tuple(A, mu)
    return verify_point(shifted, cert.witness, cert.tol, point=cert.point - np.asarray(mu, dtype=float))


def shrink_rank(A: HermitianTuple, cert: RangeCertificate) -> RangeCertificate:
    """Drop the last witness column: a rank-(k+1) point is also a rank-k point."""
    if cert.k < 2:
        raise DimensionError("cannot shrink a rank-1 certificate")
    return verify_point(A, cert.witness[:, :-1], cert.tol, point=cert.point)


def drop_coordinate(A: HermitianTuple, cert: RangeCertificate) -> tuple[HermitianTuple, RangeCertificate]:
    """Forget the last matrix of the tuple and the last coordinate of the point."""
    if A.m < 2:
        raise DimensionError("cannot drop the only coordinate")
    head = HermitianTuple._trusted(A.stack[:-1])
    return head, verify_point(head, cert.witness, cert.tol, point=cert.point[:-1])


def reduce_tuple(A: HermitianTuple, tol: float = RANK_TOL) -> tuple[HermitianTuple, RealTransform]:
    """Maximal real-linearly independent subfamily and the transform rebuilding A.

    Independence is judged in the real inner product ``Re tr(X* Y)``: a
    matrix joins the basis when its residual against the earlier members
    exceeds ``tol`` times the largest norm in the family. The returned
    ``T`` (p x m) satisfies ``A_j ~ sum_i T_ij B_i``.
    """
    vecs = np.concatenate([A.stack.real.reshape(A.m, -1), A.stack.imag.reshape(A.m, -1)], axis=1)
    scale = max(float(np.linalg.norm(vecs, axis=1).max()), 1e-300)
    basis, keep = [], []
    for j in range(A.m):
        v = vecs[j].copy()
        for _ in range(2):
            for b in basis:
                v -= np.dot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > tol * scale:
            basis.append(v / nv)
            keep.append(j)
    if not keep:
        # an all-zero family: keep the first member so the result is non-empty
        keep = [0]
    Bv = vecs[keep]
    T, *_ = np.linalg.lstsq(Bv.T, vecs.T, rcond=None)
    return HermitianTuple._trusted(A.stack[keep]), RealTransform(T)


def compression_inclusion_check(A: HermitianTuple, cert: RangeCertificate, X,
                                tol: float = VERIFY_TOL) -> RangeCertificate:
    """Certify the same point for the compressed tuple ``X* A X`` at rank ``k - r``.

    ``X`` is an isometry onto an (n - r)-dimensional subspace with ``1 <= r < k``.
    The witness spans ``X* (range(U) cap range(X))``; the intersection is read
    off the principal angles between the two ranges.
    """
    X = check_isometry(X)
    n, k = A.n, cert.k
    if X.shape[0] != n:
        raise DimensionError(f"X has {X.shape[0]} rows, tuple dimension is {n}")
    r = n - X.shape[1]
    if not 1 <= r < k:
        raise DimensionError(f"need 1 <= r < k, got r={r}, k={k}")
    s = k - r
    M = X.conj().T @ cert.witness  # (n - r, k)
    values, vectors = herm_eig(M.conj().T @ M)
    cosines = np.sqrt(np.clip(values, 0.0, None))
    inside = np.flatnonzero(cosines >= 1.0 - ANGLE_TOL)
    if inside.size < s:
        raise DegeneracyError(
            f"range(U) and range(X) share only {inside.size} directions, need {s}", int(inside.size), s
        )
    chosen = vectors[:, inside[::-1][:s]]
    W = orthonormalize(M @ chosen)
    if W.shape[1] < s:
        raise DegeneracyError("intersection basis lost rank", W.shape[1], s)
    return verify_point(compress(A, X), W, tol, point=cert.point)
