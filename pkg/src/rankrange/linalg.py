"""Dense complex linear algebra: Hermitian tuples, Jacobi eigensolver,
Gram-Schmidt orthonormalization, compressions and seeded random draws.

Matrices are plain ``numpy`` complex128 arrays. Only ``HermitianTuple`` is a
dedicated type, since most callers need the (m, n, n) stack with validation.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DimensionError, NumericalFailure, PreconditionError

HERMITIAN_TOL = 1e-12
EIG_TOL = 1e-13
MAX_SWEEPS = 64
DROP_TOL = 1e-10
ISOMETRY_TOL = 1e-10
REORTH_RATIO = 0.5


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite complex128 2-D array."""
    out = np.array(M, dtype=np.complex128)
    if out.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise PreconditionError("matrix has non-finite entries")
    return out


def symmetrize(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().swapaxes(-1, -2)) / 2


def as_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a square matrix as Hermitian and return its symmetrized copy.

    The asymmetry ``max|M - M*|`` must not exceed ``tol * max(1, max|M|)``.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"Hermitian matrix must be square, got {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    defect = float(np.abs(M - M.conj().T).max(initial=0.0))
    if defect > tol * scale:
        raise PreconditionError(f"matrix is not Hermitian (max |M - M*| = {defect:.3e})", defect)
    return symmetrize(M)


class HermitianTuple:
    """An m-tuple of n x n Hermitian matrices, stored as a read-only (m, n, n) stack."""

    __slots__ = ("_stack",)

    def __init__(self, matrices, tol: float = HERMITIAN_TOL):
        if isinstance(matrices, HermitianTuple):
            self._stack = matrices._stack
            return
        mats = [as_hermitian(M, tol) for M in matrices]
        if not mats:
            raise DimensionError("a Hermitian tuple needs at least one matrix")
        n = mats[0].shape[0]
        if any(M.shape != (n, n) for M in mats):
            raise DimensionError("all matrices in a tuple must share one dimension")
        stack = np.stack(mats)
        stack.setflags(write=False)
        self._stack = stack

    @classmethod
    def _trusted(cls, stack: np.ndarray) -> HermitianTuple:
        # internal: stack is already Hermitian (symmetrized by the caller)
        obj = cls.__new__(cls)
        stack = np.ascontiguousarray(stack, dtype=np.complex128)
        stack.setflags(write=False)
        obj._stack = stack
        return obj

    @property
    def stack(self) -> np.ndarray:
        return self._stack

    @property
    def m(self) -> int:
        return self._stack.shape[0]

    @property
    def n(self) -> int:
        return self._stack.shape[1]

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, j) -> np.ndarray:
        return self._stack[j]

    def __iter__(self):
        return iter(self._stack)

    def __repr__(self) -> str:
        return f"HermitianTuple(m={self.m}, n={self.n})"

    def combine(self, c) -> np.ndarray:
        """The real linear combination ``sum_i c_i A_i``."""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.m,):
            raise DimensionError(f"coefficient vector must have length {self.m}")
        return np.tensordot(c, self._stack, axes=1)

    def norm(self) -> float:
        """Frobenius norm of the whole stack."""
        return float(np.linalg.norm(self._stack))


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def herm_eig(A, tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS, backend=None) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Eigenvalues come back ascending. Each eigenvector is phase-fixed so its
    largest-magnitude entry (lowest index on ties) is real and positive.
    Sweeps stop once the largest off-diagonal modulus is at most
    ``tol * max(1, ||A||_F)``.
    """
    a = np.array(symmetrize(as_matrix(A)), dtype=np.complex128, order="C")
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    impl = kernels.get_backend(backend)
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    _, off = impl.jacobi_sweeps(a, v, kernels.jacobi_schedule(n), threshold, max_sweeps)
    if off > threshold:
        raise NumericalFailure(
            f"Jacobi did not converge in {max_sweeps} sweeps (max off-diagonal {off:.3e})", off
        )
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    v = v[:, order]
    if n:
        lead = np.argmax(np.abs(v), axis=0)
        pivots = v[lead, np.arange(n)]
        v = v * (np.abs(pivots) / pivots)
    return EigenDecomposition(values, v)


def kth_largest_eigenvalue(A, k: int) -> float:
    values = herm_eig(A).values
    if not 1 <= k <= values.size:
        raise DimensionError(f"k={k} outside 1..{values.size}")
    return float(values[-k])


def _project_out(Q: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
    """Modified Gram-Schmidt projection of ``v`` against the columns of ``Q``.

    Returns the residual and the largest projection coefficient relative to
    the norm of ``v``.
    """
    nv = np.linalg.norm(v)
    worst = 0.0
    for i in range(Q.shape[1]):
        h = np.vdot(Q[:, i], v)
        v = v - h * Q[:, i]
        worst = max(worst, abs(h))
    return v, (worst / nv if nv > 0 else 0.0)


def orthonormalize(S, drop_tol: float = DROP_TOL) -> np.ndarray:
    """Orthonormal basis of span(S) by modified Gram-Schmidt.

    A second pass runs whenever some projection coefficient exceeds half the
    vector's norm; vectors whose residual norm falls below ``drop_tol`` are
    treated as dependent and dropped.
    """
    S = as_matrix(S)
    n = S.shape[0]
    cols = []
    Q = np.zeros((n, 0), dtype=np.complex128)
    for j in range(S.shape[1]):
        v, ratio = _project_out(Q, S[:, j])
        if ratio > REORTH_RATIO:
            v, _ = _project_out(Q, v)
        nv = np.linalg.norm(v)
        if nv < drop_tol:
            continue
        cols.append(v / nv)
        Q = np.column_stack(cols)
    return Q


def orth_complement(S, within=None, dim: int | None = None) -> np.ndarray:
    """Orthonormal columns orthogonal to every column of ``S``.

    With ``within`` (orthonormal columns) the result lies in its span. ``dim``
    caps the number of columns returned; asking for more than the complement
    holds raises ``DimensionError``. Candidates are standard basis vectors,
    taken greedily by largest residual so that each one is well conditioned.
    """
    S = as_matrix(S) if np.size(S) else np.zeros((np.shape(S)[0], 0), dtype=np.complex128)
    n = S.shape[0]
    if within is not None:
        W = as_matrix(within)
        if W.shape[0] != n:
            raise DimensionError(f"'within' has {W.shape[0]} rows, expected {n}")
        check_isometry(W)
        return W @ orth_complement(W.conj().T @ S, None, dim)

    Q = orthonormalize(S)
    available = n - Q.shape[1]
    want = available if dim is None else dim
    if want > available:
        raise DimensionError(
            f"requested {want} complement vectors but only {available} are available in C^{n}"
        )
    out = []
    weight = np.sum(np.abs(Q) ** 2, axis=1)
    for _ in range(want):
        i = int(np.argmax(1.0 - weight))
        e = np.zeros(n, dtype=np.complex128)
        e[i] = 1.0
        basis = np.column_stack([Q] + out) if out else Q
        v, ratio = _project_out(basis, e)
        if ratio > REORTH_RATIO:
            v, _ = _project_out(basis, v)
        nv = np.linalg.norm(v)
        if nv < DROP_TOL:
            raise NumericalFailure(f"complement vector collapsed (residual {nv:.3e})", nv)
        v = v / nv
        out.append(v)
        weight = weight + np.abs(v) ** 2
    if not out:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(out)


def isometry_defect(U) -> float:
    """``||U*U - I||_F``."""
    U = np.asarray(U)
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[1])))


def check_isometry(U, tol: float = ISOMETRY_TOL) -> np.ndarray:
    U = as_matrix(U)
    defect = isometry_defect(U)
    if defect > tol:
        raise PreconditionError(f"columns are not orthonormal (||U*U - I||_F = {defect:.3e})", defect)
    return U


def compress(A: HermitianTuple, U, tol: float = ISOMETRY_TOL) -> HermitianTuple:
    """The compressed tuple ``(U* A_1 U, ..., U* A_m U)``."""
    U = check_isometry(U, tol)
    if U.shape[0] != A.n:
        raise DimensionError(f"isometry has {U.shape[0]} rows, tuple dimension is {A.n}")
    return HermitianTuple._trusted(symmetrize(U.conj().T @ A.stack @ U))


def hermitian_split(T) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix as ``T = H1 + i H2`` with both parts Hermitian."""
    T = as_matrix(T)
    if T.shape[0] != T.shape[1]:
        raise DimensionError(f"expected a square matrix, got {T.shape}")
    Th = T.conj().T
    return (T + Th) / 2, (T - Th) / 2j


def seeded_random(kind: str, n: int, k: int | None = None, seed: int = 0) -> np.ndarray:
    """Deterministic random draws: "hermitian" (n x n), "isometry" (n x k), "unit_vector" (n,)."""
    rng = np.random.default_rng(seed)
    if n < 1:
        raise DimensionError("n must be positive")
    if kind == "hermitian":
        G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        return symmetrize(G)
    if kind == "isometry":
        if k is None or not 1 <= k <= n:
            raise DimensionError(f"isometry needs 1 <= k <= n, got k={k}, n={n}")
        return random_isometry(rng, n, k)
    if kind == "unit_vector":
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return x / np.linalg.norm(x)
    raise ValueError(f"unknown kind {kind!r}")


def random_isometry(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    G = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    return qr_isometry(G)


def qr_isometry(G: np.ndarray) -> np.ndarray:
    """Q factor of a thin QR with diag(R) made real positive; works on stacks."""
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return Q * phase[..., None, :]
