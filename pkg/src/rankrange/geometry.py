"""Geometry of the rank-k range: half-space outer bounds, star segments, the
sphere family, and inner sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, NumericalFailure
from .linalg import HermitianTuple, herm_eig, orth_complement
from .rank_k import VERIFY_TOL, RangeCertificate, free_samples, translate_tuple, verify_point

DIRECTIONS = 512
SLACK_TOL = 1e-8
CASE_RANK_TOL = 1e-8
ROOT_TOL = 1e-12


# ---------------------------------------------------------------------------
# outer approximation


@dataclass(frozen=True)
class HalfspaceSet:
    """Half-spaces ``c . a <= bound`` with ``bound`` the k-th largest eigenvalue of ``c . A``."""

    k: int
    directions: np.ndarray  # (N, m), unit rows
    bounds: np.ndarray  # (N,)

    @property
    def entries(self):
        return list(zip(self.directions, self.bounds))

    def __len__(self) -> int:
        return self.bounds.size


def axis_directions(m: int) -> np.ndarray:
    eye = np.eye(m)
    return np.stack([s * eye[i] for i in range(m) for s in (1.0, -1.0)])


def sample_directions(m: int, count: int = DIRECTIONS, seed: int = 0) -> np.ndarray:
    """The 2m signed axes followed by seeded Gaussian directions, ``count`` rows in total."""
    axes = axis_directions(m)
    extra = max(0, count - axes.shape[0])
    g = np.random.default_rng(seed).standard_normal((extra, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.concatenate([axes, g])


def outer_halfspaces(A: HermitianTuple, k: int, directions: int | np.ndarray = DIRECTIONS,
                     seed: int = 0) -> HalfspaceSet:
    if not 1 <= k <= A.n:
        raise DimensionError(f"k={k} must lie in 1..{A.n}")
    if np.ndim(directions) == 0:
        C = sample_directions(A.m, int(directions), seed)
    else:
        C = np.atleast_2d(np.asarray(directions, dtype=float))
        if C.shape[1] != A.m:
            raise DimensionError(f"directions have {C.shape[1]} coordinates, tuple has {A.m}")
    bounds = np.array([herm_eig(A.combine(c)).values[-k] for c in C])
    return HalfspaceSet(k, C, bounds)


@dataclass(frozen=True)
class SlackReport:
    min_slack: float
    worst_index: int
    consistent: bool


def check_against_halfspaces(H: HalfspaceSet, a, tol: float = SLACK_TOL) -> SlackReport:
    """Smallest ``bound - c . a``; a point of the range never goes below ``-tol``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (H.directions.shape[1],):
        raise DimensionError("point and half-space dimensions differ")
    slack = H.bounds - H.directions @ a
    i = int(np.argmin(slack))
    return SlackReport(float(slack[i]), i, bool(slack[i] >= -tol))


# ---------------------------------------------------------------------------
# star segments


@dataclass
class StarSegment:
    center: RangeCertificate
    tip: RangeCertificate
    samples: list = field(default_factory=list)  # (t, RangeCertificate)
    case: int | None = None  # rank-1 construction branch
    first_row_rank: int | None = None

    def points(self) -> np.ndarray:
        return np.array([c.point for _, c in self.samples])

    @property
    def all_verified(self) -> bool:
        return all(c.accepted for _, c in self.samples)


def star_segment_rank_k(A: HermitianTuple, center: RangeCertificate, tip: RangeCertificate, ts,
                        tol: float = VERIFY_TOL) -> StarSegment:
    """Certify the segment from a rank-k_hat center to a rank-k tip at rank k.

    Needs ``k_hat >= (m+2) k``. With the center moved to the origin, ``Y1``
    is a k-dimensional piece of the center's range orthogonal to the tip's
    range X and to every ``A_j X``; the sample at t uses columns
    ``sqrt(t) x_i + sqrt(1-t) y1_i``.
    """
    k_hat, k = center.k, tip.k
    if k_hat < (A.m + 2) * k:
        raise DimensionError(f"need k_hat >= (m+2)k = {(A.m + 2) * k}, got {k_hat}")
    origin = center.point
    shifted = translate_tuple(A, origin)
    X = tip.witness
    S = np.column_stack([X] + [shifted[j] @ X for j in range(A.m)])
    Y1 = orth_complement(S, within=center.witness, dim=k)
    seg = StarSegment(center, tip)
    for t in ts:
        t = float(t)
        W = np.sqrt(t) * X + np.sqrt(1.0 - t) * Y1
        expected = (1.0 - t) * origin + t * tip.point
        seg.samples.append((t, verify_point(A, W, tol, point=expected)))
    return seg


def _real_map(V: np.ndarray) -> np.ndarray:
    """Rows ``2 [Re v_j, -Im v_j]``, so that ``L @ [Re w, Im w] = 2 Re(v_j . w)``."""
    return 2.0 * np.concatenate([V.real, -V.imag], axis=1)


def _to_complex(w: np.ndarray) -> np.ndarray:
    h = w.size // 2
    return w[:h] + 1j * w[h:]


def _case1_vector(t, u0, z, kernel_dir):
    # y = sqrt(t) xi + s (0, d) with d in ker L; pick s >= 0 so that ||y|| = 1
    d = _to_complex(kernel_dir)
    beta = np.sqrt(t) * np.vdot(z, d).real
    s = -beta + np.sqrt(beta * beta + 1.0 - t)
    return np.concatenate([[np.sqrt(t) * u0], np.sqrt(t) * z + s * d])


def _case2_vector(t, u0, z, dmin):
    d = _to_complex(dmin)

    def vec(xi):
        return np.concatenate([[xi * u0], (t / xi) * z + ((t - xi * xi) / xi) * d])

    def excess(xi):
        return np.linalg.norm(vec(xi)) - 1.0

    lo = np.sqrt(t)
    hi = 2.0 * lo
    while excess(hi) < 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NumericalFailure("could not bracket the unit-norm scaling")
    for _ in range(200):
        mid = (lo + hi) / 2
        e = excess(mid)
        if abs(e) <= ROOT_TOL or hi - lo <= 1e-15 * hi:
            break
        if e < 0.0:
            lo = mid
        else:
            hi = mid
    y = vec(mid)
    return y / np.linalg.norm(y)


def star_segment_rank_1(A: HermitianTuple, center: RangeCertificate, x, ts,
                        tol: float = VERIFY_TOL) -> StarSegment:
    """Certify the segment from a rank-k_hat center to ``<A x, x>`` inside the numerical range.

    Needs ``k_hat > (m+1)/2``. In the basis ``[x_perp | X]`` (X the center
    witness, origin moved to the center) each compressed matrix has a zero
    k_hat x k_hat block, so only its first row matters. When the first-row
    vectors are real-linearly dependent (case 1) the scaled vector is padded
    along the kernel of the first-row map; otherwise (case 2) the first
    coordinate is rescaled by a root-found factor and the rest corrected by a
    minimum-norm solve.
    """
    k_hat = center.k
    if 2 * k_hat <= A.m + 1:
        raise DimensionError(f"need k_hat > (m+1)/2, got k_hat={k_hat}, m={A.m}")
    x = np.asarray(x, dtype=np.complex128).ravel()
    if x.size != A.n:
        raise DimensionError("vector dimension differs from the tuple")
    x = x / np.linalg.norm(x)
    origin = center.point
    shifted = translate_tuple(A, origin)
    X = center.witness
    b = np.einsum("a,jab,b->j", x.conj(), shifted.stack, x).real
    tip = verify_point(A, x[:, None], tol, point=origin + b)

    z = X.conj().T @ x
    perp = x - X @ z
    u0 = float(np.linalg.norm(perp))
    seg = StarSegment(center, tip)
    if u0 < 1e-12:
        # x lies in the center's range, so <A x, x> is the center itself
        for t in ts:
            seg.samples.append((float(t), verify_point(A, x[:, None], tol, point=origin)))
        return seg

    Y = np.column_stack([perp / u0, X])
    B = np.einsum("ai,jab,bl->jil", Y.conj(), shifted.stack, Y)
    alpha = B[:, 0, 0].real
    L = _real_map(B[:, 0, 1:])
    _, sing, vt = np.linalg.svd(L)
    rank = int(np.sum(sing > CASE_RANK_TOL * max(sing.max(initial=0.0), 1e-300)))
    seg.first_row_rank = rank
    seg.case = 2 if rank == A.m else 1
    kernel_dir = vt[-1] if vt.shape[0] > rank else None
    dmin = np.linalg.lstsq(L, alpha * u0, rcond=None)[0]

    def build(case, t):
        if case == 1:
            if kernel_dir is None:
                return None
            return _case1_vector(t, u0, z, kernel_dir)
        return _case2_vector(t, u0, z, dmin)

    for t in ts:
        t = float(t)
        expected = origin + t * b
        if t == 0.0:
            col = X[:, :1]
        elif t == 1.0:
            col = x[:, None]
        else:
            col = None
            for case in (seg.case, 3 - seg.case):
                y = build(case, t)
                if y is None:
                    continue
                trial = (Y @ y)[:, None]
                if verify_point(A, trial, tol, point=expected).accepted:
                    col = trial
                    break
            if col is None:
                raise NumericalFailure(
                    f"neither construction verified at t={t} (first-row real rank {rank}, m={A.m})"
                )
        seg.samples.append((t, verify_point(A, col, tol, point=expected)))
    return seg


# ---------------------------------------------------------------------------
# sphere family


PAULI_GENERATORS = (
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
)


def sphere_coefficients(a, tol: float = 1e-10) -> tuple[complex, complex]:
    """``(alpha, beta)`` with ``(alpha, beta)* B_j (alpha, beta) = a_j`` for a unit ``a``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,) or abs(np.linalg.norm(a) - 1.0) > tol:
        raise DomainError(f"the closed-form witness needs a unit vector in R^3, got {a}")
    if a[0] == -1.0 or 1.0 + a[0] <= tol:
        return 0j, 1 + 0j
    scale = np.sqrt(2.0 * (1.0 + a[0]))
    return complex(1.0 + a[0]) / scale, complex(a[1], -a[2]) / scale


def sphere_family(k: int):
    """``A_j = B_j (x) I_k`` on C^{2k}; its rank-k range is the unit sphere in R^3.

    Returns the tuple and a map from a unit ``a`` to the isometry
    ``[alpha I_k; beta I_k]``.
    """
    if k < 1:
        raise DimensionError("k must be positive")
    A = HermitianTuple([np.kron(B, np.eye(k)) for B in PAULI_GENERATORS])

    def witness(a) -> np.ndarray:
        alpha, beta = sphere_coefficients(a)
        return np.kron(np.array([[alpha], [beta]]), np.eye(k))

    return A, witness


def sample_inner(A: HermitianTuple, k: int, samples: int, seed: int = 0,
                 tol: float = VERIFY_TOL) -> list[RangeCertificate]:
    """Verified rank-k points from independent free-mode descents (possibly fewer than asked)."""
    if not 1 <= k <= A.n:
        raise DimensionError(f"k={k} must lie in 1..{A.n}")
    return free_samples(A, k, samples, seed, tol=tol)
