"""Constructive non-emptiness of the rank-k range for large enough dimension.

Pipeline: an orthonormal chain ``x_1, ..., x_q`` whose compressions
``<A_j x_i, x_r>`` are all diagonal, a Tverberg partition of the chain's
diagonal points into k parts with a common point, then one witness column per
part built from square roots of the convex weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundError, ComplexityError, DimensionError, NumericalFailure
from .linalg import HermitianTuple, herm_eig, orth_complement
from .lp import simplex
from .rank_k import VERIFY_TOL, RangeCertificate, verify_point

MAX_POINTS = 16
COMMON_TOL = 1e-8


@dataclass(frozen=True)
class OrthogonalChain:
    vectors: np.ndarray  # n x q, orthonormal columns
    diag_points: np.ndarray  # q x m, row i is <A x_i, x_i>

    @property
    def q(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class TverbergPartition:
    parts: tuple[tuple[int, ...], ...]  # 0-based indices into the point list
    weights: tuple[np.ndarray, ...]  # convex weights, aligned with parts
    common_point: np.ndarray

    @property
    def k(self) -> int:
        return len(self.parts)

    def residual(self, points) -> float:
        """Largest ``||sum_i t_i p_i - common||_inf`` over the parts."""
        points = np.asarray(points, dtype=float)
        return max(
            float(np.abs(w @ points[list(part)] - self.common_point).max())
            for part, w in zip(self.parts, self.weights)
        )


def chain_bound(m: int, k: int) -> int:
    return (k - 1) * (m + 1) ** 2


def build_chain(A: HermitianTuple, q: int) -> OrthogonalChain:
    """Orthonormal ``x_1..x_q`` with ``x_r`` orthogonal to every ``A_j x_i`` for ``i < r``.

    ``x_1`` is the lowest-eigenvalue eigenvector of ``A_1``, which saves one
    constraint; each later vector is the best-conditioned standard-basis
    direction of the remaining complement.
    """
    if q < 1:
        raise DimensionError("chain length must be positive")
    x1 = herm_eig(A[0]).vectors[:, 0]
    xs = [x1]
    spans = [x1] + [A[j] @ x1 for j in range(A.m)]
    for r in range(1, q):
        try:
            x = orth_complement(np.column_stack(spans), dim=1)[:, 0]
        except DimensionError as exc:
            raise DimensionError(
                f"orthogonal chain ran out of room at vector {r + 1} of {q} in dimension {A.n}; "
                f"the construction needs n >= (k-1)(m+1)^2"
            ) from exc
        xs.append(x)
        spans.append(x)
        spans.extend(A[j] @ x for j in range(A.m))
    X = np.column_stack(xs)
    points = np.einsum("ai,jab,bi->ij", X.conj(), A.stack, X).real
    return OrthogonalChain(X, points)


def restricted_growth_strings(q: int, k: int):
    """Set partitions of ``range(q)`` into exactly k blocks, lexicographic order."""
    a = [0] * q

    def rec(i, used):
        if i == q:
            if used == k:
                yield tuple(a)
            return
        if k - used > q - i:
            return
        for v in range(min(used + 1, k)):
            a[i] = v
            yield from rec(i + 1, max(used, v + 1))

    if q >= 1 and 1 <= k <= q:
        a[0] = 0
        yield from rec(1, 1)


def _blocks(rgs, k):
    parts = [[] for _ in range(k)]
    for i, b in enumerate(rgs):
        parts[b].append(i)
    return parts


def _common_point_lp(points, parts, feas_tol):
    """Feasibility LP for convex weights whose per-part combinations coincide.

    The common point is eliminated by equating every part's combination to
    that of the first part, leaving an equality system in the weights alone.
    """
    q, m = points.shape
    k = len(parts)
    rows, rhs = [], []
    for j in range(1, k):
        for l in range(m):
            row = np.zeros(q)
            row[parts[j]] = points[parts[j], l]
            row[parts[0]] -= points[parts[0], l]
            rows.append(row)
            rhs.append(0.0)
    for part in parts:
        row = np.zeros(q)
        row[part] = 1.0
        rows.append(row)
        rhs.append(1.0)
    res = simplex(np.zeros(q), np.array(rows), np.array(rhs), feas_tol=feas_tol)
    if res.status != "optimal":
        return None
    weights = []
    for part in parts:
        w = np.clip(res.x[part], 0.0, None)
        weights.append(w / w.sum())
    combos = np.array([w @ points[part] for w, part in zip(weights, parts)])
    common = combos.mean(axis=0)
    return tuple(weights), common


def tverberg_partition(points, k: int, *, feas_tol: float = 1e-9) -> TverbergPartition:
    """First partition (in restricted-growth order) whose k convex hulls share a point.

    Tverberg's theorem guarantees one exists once ``q >= (m+1)(k-1)+1``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    q, m = points.shape
    if q > MAX_POINTS:
        raise ComplexityError(f"{q} points exceed the supported enumeration size {MAX_POINTS}")
    if not 1 <= k <= q:
        raise DimensionError(f"cannot split {q} points into {k} parts")
    if q < (m + 1) * (k - 1) + 1:
        raise DimensionError(f"{q} points in R^{m} are too few for a guaranteed {k}-part partition")
    for rgs in restricted_growth_strings(q, k):
        parts = _blocks(rgs, k)
        singles = [p[0] for p in parts if len(p) == 1]
        if len(singles) > 1 and np.abs(points[singles] - points[singles[0]]).max() > COMMON_TOL:
            continue  # distinct singleton parts cannot share a point
        found = _common_point_lp(points, parts, feas_tol)
        if found is None:
            continue
        weights, common = found
        part = TverbergPartition(tuple(tuple(p) for p in parts), weights, common)
        if part.residual(points) <= COMMON_TOL:
            return part
    raise NumericalFailure("no partition passed the feasibility check; tolerance may be too tight")


def assemble_witness(A: HermitianTuple, chain: OrthogonalChain, partition: TverbergPartition,
                     tol: float = VERIFY_TOL) -> RangeCertificate:
    """Witness columns ``y_j = sum_{i in R_j} sqrt(t_ij) x_i``, one per part."""
    if sum(len(p) for p in partition.parts) != chain.q:
        raise DimensionError("partition does not cover the chain")
    cols = [chain.vectors[:, list(part)] @ np.sqrt(w) for part, w in zip(partition.parts, partition.weights)]
    return verify_point(A, np.column_stack(cols), tol)


def construct_point(A: HermitianTuple, k: int, tol: float = VERIFY_TOL) -> RangeCertificate:
    """A certified point of the rank-k range, valid whenever ``n >= (k-1)(m+1)^2``.

    Raises ``BoundError`` below the bound rather than guessing.
    """
    if k < 1:
        raise DimensionError("k must be positive")
    if k == 1:
        x = herm_eig(A[0]).vectors[:, :1]
        return verify_point(A, x, tol)
    bound = chain_bound(A.m, k)
    if A.n < bound:
        raise BoundError(f"n = {A.n} is below (k-1)(m+1)^2 = {bound} for m = {A.m}, k = {k}")
    q = (A.m + 1) * (k - 1) + 1
    if q > MAX_POINTS:
        raise ComplexityError(f"chain length q = {q} exceeds {MAX_POINTS}")
    chain = build_chain(A, q)
    partition = tverberg_partition(chain.diag_points, k)
    cert = assemble_witness(A, chain, partition, tol)
    if not cert.accepted:
        raise NumericalFailure(f"assembled witness has residual {cert.residual:.3e}", cert.residual)
    return cert
