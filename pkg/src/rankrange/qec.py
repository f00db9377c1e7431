"""Quantum error-correcting codes through the rank-k range of the KL tuple.

A k-dimensional subspace with projection P corrects the channel ``{T_j}``
exactly when ``P T_i* T_j P = gamma_ij P`` for scalars ``gamma_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .channel import KrausChannel, kl_tuple
from .errors import BoundError, ComplexityError, DimensionError, DomainError, NumericalFailure
from .linalg import check_isometry, qr_isometry
from .rank_k import OPTIMIZER_TOL, RESTARTS, membership_solve, reduce_tuple
from .tverberg import MAX_POINTS, chain_bound, construct_point

CODE_TOL = 1e-8
FOUND_TOL = 1e-6


@dataclass(frozen=True)
class CodeCertificate:
    basis: np.ndarray  # n x k isometry
    gamma: np.ndarray  # r x r
    residual: float  # max_{i,j} ||P T_i* T_j P - gamma_ij P||_F
    accepted: bool
    tol: float = CODE_TOL

    @property
    def k(self) -> int:
        return self.basis.shape[1]


def verify_code(ch: KrausChannel, U, tol: float = CODE_TOL) -> CodeCertificate:
    """Evaluate the Knill-Laflamme condition on ``range(U)``."""
    U = check_isometry(U)
    if U.shape[0] != ch.n:
        raise DimensionError(f"code basis has {U.shape[0]} rows, channel acts on dimension {ch.n}")
    k = U.shape[1]
    TU = ch.kraus @ U  # (r, n, k)
    C = np.einsum("iak,jal->ijkl", TU.conj(), TU)  # U* T_i* T_j U
    gamma = np.trace(C, axis1=2, axis2=3) / k
    D = C - gamma[:, :, None, None] * np.eye(k)
    # ||U D U*||_F = ||D||_F since U is an isometry
    residual = float(np.sqrt(np.sum(np.abs(D) ** 2, axis=(2, 3))).max())
    return CodeCertificate(U, gamma, residual, residual <= tol, tol)


@dataclass
class CodeSearch:
    """Outcome of ``find_code``. ``method`` is ``"construct"`` or ``"search"``."""

    success: bool
    certificate: CodeCertificate | None
    best_residual: float
    method: str
    reduced_m: int


def find_code(ch: KrausChannel, k: int, *, seed: int = 0, restarts: int = RESTARTS,
              tol: float = FOUND_TOL, optimizer_tol: float = OPTIMIZER_TOL, workers: int = 1,
              max_iters: int | None = None) -> CodeSearch:
    """Look for a k-dimensional code, constructively when the dimension bound allows."""
    if not 1 <= k <= ch.n:
        raise DimensionError(f"k={k} must lie in 1..{ch.n}")
    ch = ch.without_zero_operators()
    kl = kl_tuple(ch)
    B, _ = reduce_tuple(kl.base)
    m = B.m
    if k == 1 or (ch.n >= chain_bound(m, k) and (m + 1) * (k - 1) + 1 <= MAX_POINTS):
        try:
            cert = construct_point(B, k)
        except (BoundError, ComplexityError, NumericalFailure):
            pass
        else:
            code = verify_code(ch, cert.witness, tol)
            return CodeSearch(code.accepted, code, code.residual, "construct", m)
    opts = {} if max_iters is None else {"max_iters": max_iters}
    res = membership_solve(B, None, k, free=True, restarts=restarts, tol=optimizer_tol,
                           seed=seed, workers=workers, **opts)
    code = verify_code(ch, qr_isometry(res.certificate.witness), tol)
    return CodeSearch(code.accepted, code if code.accepted else None, code.residual, "search", m)


# ---------------------------------------------------------------------------
# built-in channels

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_on(label: str, qubit: int, nqubits: int) -> np.ndarray:
    """``label`` acting on ``qubit`` (1-based, qubit 1 is the leftmost tensor factor)."""
    factors = [PAULI[label] if q == qubit else PAULI["I"] for q in range(1, nqubits + 1)]
    return reduce(np.kron, factors)


def _probability(params, key, default=None):
    value = params.get(key, default)
    if value is None:
        raise DomainError(f"missing parameter {key!r}")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{key} must lie in [0, 1], got {value}")
    return value


def _bit_flip_3q(params):
    p = _probability(params, "p", 0.3)
    ops = [np.sqrt(1 - p) * np.eye(8)]
    ops += [np.sqrt(p / 3) * pauli_on("X", q, 3) for q in (1, 2, 3)]
    return ops


def _phase_flip_3q(params):
    p = _probability(params, "p", 0.3)
    ops = [np.sqrt(1 - p) * np.eye(8)]
    ops += [np.sqrt(p / 3) * pauli_on("Z", q, 3) for q in (1, 2, 3)]
    return ops


def _single_qubit_bitflip(params):
    p = _probability(params, "p")
    return [np.sqrt(1 - p) * PAULI["I"], np.sqrt(p) * PAULI["X"]]


def _depolarizing_1q(params):
    p = _probability(params, "p")
    return [np.sqrt(1 - 3 * p / 4) * PAULI["I"]] + [np.sqrt(p / 4) * PAULI[s] for s in "XYZ"]


def _amplitude_damping(params):
    g = _probability(params, "gamma")
    return [
        np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=np.complex128),
        np.array([[0, np.sqrt(g)], [0, 0]], dtype=np.complex128),
    ]


BUILTIN = {
    "bit_flip_3q": _bit_flip_3q,
    "phase_flip_3q": _phase_flip_3q,
    "single_qubit_bitflip": _single_qubit_bitflip,
    "depolarizing_1q": _depolarizing_1q,
    "amplitude_damping": _amplitude_damping,
}


@dataclass(frozen=True)
class NamedChannel:
    name: str
    params: dict
    channel: KrausChannel


def builtin_channel(name: str, params: dict | None = None) -> NamedChannel:
    """One of the built-in test channels, with zero Kraus operators removed.

    Multi-qubit operators put qubit 1 in the most significant tensor factor,
    so ``X_1 = X (x) I (x) I``.
    """
    if name not in BUILTIN:
        raise DomainError(f"unknown channel {name!r}; choose from {sorted(BUILTIN)}")
    params = dict(params or {})
    ch = KrausChannel(BUILTIN[name](params)).without_zero_operators()
    return NamedChannel(name, params, ch)
