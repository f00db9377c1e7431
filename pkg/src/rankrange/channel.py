"""Kraus channels and their Knill-Laflamme Hermitian tuples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .linalg import HermitianTuple, as_matrix, symmetrize

TP_TOL = 1e-10


class KrausChannel:
    """A channel ``X -> sum_j T_j X T_j*`` given by r square Kraus operators.

    Trace preservation is checked at construction unless ``check=False``;
    deliberately non-TP operator sets can still be analysed that way.
    """

    def __init__(self, kraus, check: bool = True, tol: float = TP_TOL):
        ops = [as_matrix(T) for T in kraus]
        if not ops:
            raise DimensionError("a channel needs at least one Kraus operator")
        n = ops[0].shape[0]
        if any(T.shape != (n, n) for T in ops):
            raise DimensionError("Kraus operators must be square and share one dimension")
        stack = np.stack(ops)
        stack.setflags(write=False)
        self.kraus = stack
        if check:
            report = validate_kraus(self, tol)
            if not report.ok:
                raise ValueError(
                    f"Kraus operators are not trace preserving (residual {report.residual:.3e})"
                )

    @property
    def r(self) -> int:
        return self.kraus.shape[0]

    @property
    def n(self) -> int:
        return self.kraus.shape[1]

    def __repr__(self) -> str:
        return f"KrausChannel(r={self.r}, n={self.n})"

    def without_zero_operators(self, tol: float = 1e-14) -> KrausChannel:
        keep = [T for T in self.kraus if np.linalg.norm(T) > tol]
        if not keep:
            keep = [np.zeros((self.n, self.n), dtype=np.complex128)]
        return KrausChannel(keep, check=False)


@dataclass(frozen=True)
class TPReport:
    ok: bool
    residual: float


def validate_kraus(ch: KrausChannel, tol: float = TP_TOL) -> TPReport:
    """Check the completeness relation ``sum_j T_j* T_j = I``."""
    total = np.einsum("jba,jbc->ac", ch.kraus.conj(), ch.kraus)
    residual = float(np.linalg.norm(total - np.eye(ch.n)))
    return TPReport(residual <= tol, residual)


def apply_channel(ch: KrausChannel, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape != (ch.n, ch.n):
        raise DimensionError(f"state has shape {X.shape}, channel acts on {ch.n}x{ch.n}")
    return np.einsum("jab,bc,jdc->ad", ch.kraus, X, ch.kraus.conj())


@dataclass(frozen=True)
class KLTuple:
    """Hermitian encoding of all products ``T_i* T_j``.

    ``labels[s] = (i, j, part)`` with 0-based operator indices: ``"diag"`` for
    ``T_i* T_i``; for ``i < j`` the pair ``"herm"``/``"skew"`` holds H and K
    with ``T_i* T_j = H + iK``.
    """

    base: HermitianTuple
    labels: tuple[tuple[int, int, str], ...]

    def product(self, i: int, j: int) -> np.ndarray:
        """Rebuild ``T_i* T_j`` from the stored Hermitian parts."""
        if i == j:
            return self.base[self.labels.index((i, i, "diag"))].copy()
        lo, hi = min(i, j), max(i, j)
        H = self.base[self.labels.index((lo, hi, "herm"))]
        K = self.base[self.labels.index((lo, hi, "skew"))]
        P = H + 1j * K
        return P if i < j else P.conj().T

    def gamma_from_point(self, point) -> np.ndarray:
        """Assemble the r x r scalar matrix from a point of the tuple's range."""
        r = 1 + max(lab[1] for lab in self.labels)
        gamma = np.zeros((r, r), dtype=np.complex128)
        parts = {}
        for value, (i, j, part) in zip(point, self.labels):
            parts[(i, j, part)] = value
        for i in range(r):
            gamma[i, i] = parts[(i, i, "diag")]
            for j in range(i + 1, r):
                gamma[i, j] = parts[(i, j, "herm")] + 1j * parts[(i, j, "skew")]
                gamma[j, i] = np.conj(gamma[i, j])
        return gamma


def kl_tuple(ch: KrausChannel) -> KLTuple:
    """The r^2 Hermitian matrices whose joint rank-k range decides code existence."""
    T = ch.kraus
    prods = np.einsum("iba,jbc->ijac", T.conj(), T)  # prods[i, j] = T_i* T_j
    mats, labels = [], []
    for i in range(ch.r):
        mats.append(symmetrize(prods[i, i]))
        labels.append((i, i, "diag"))
        for j in range(i + 1, ch.r):
            P = prods[i, j]
            Ph = P.conj().T
            mats.append((P + Ph) / 2)
            labels.append((i, j, "herm"))
            mats.append((P - Ph) / 2j)
            labels.append((i, j, "skew"))
    return KLTuple(HermitianTuple._trusted(np.stack(mats)), tuple(labels))
