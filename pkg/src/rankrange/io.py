"""JSON encodings for matrices, tuples, channels and certificates.

Matrices are ``{"n": rows, "re": [[...]], "im": [[...]]}`` (an extra ``"k"``
key appears for non-square isometries). Floats are written in Python's
shortest round-trip form, so output is byte-stable.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .channel import KrausChannel
from .errors import DimensionError
from .geometry import HalfspaceSet
from .linalg import HermitianTuple
from .qec import CodeCertificate
from .rank_k import RangeCertificate


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=np.complex128))
    out = {"n": M.shape[0], "re": _floats(M.real), "im": _floats(M.imag)}
    if M.shape[0] != M.shape[1]:
        out["k"] = M.shape[1]
    return out


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, list):  # bare real nested list
        return np.array(obj, dtype=np.complex128)
    try:
        re = np.array(obj["re"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise DimensionError("matrix object needs an 're' field") from exc
    im = np.array(obj["im"], dtype=float) if "im" in obj else np.zeros_like(re)
    if re.ndim != 2 or re.shape != im.shape:
        raise DimensionError("matrix 're'/'im' must be equal-shape 2-D arrays")
    if "n" in obj and obj["n"] != re.shape[0]:
        raise DimensionError(f"declared n={obj['n']} but matrix has {re.shape[0]} rows")
    return re + 1j * im


def tuple_to_json(A: HermitianTuple) -> dict:
    return {"matrices": [matrix_to_json(M) for M in A]}


def tuple_from_json(obj) -> HermitianTuple:
    if isinstance(obj, dict) and "matrices" in obj:
        obj = obj["matrices"]
    return HermitianTuple([matrix_from_json(M) for M in obj])


def channel_to_json(ch: KrausChannel) -> dict:
    return {"n": ch.n, "kraus": [matrix_to_json(T) for T in ch.kraus]}


def channel_from_json(obj, check: bool = True) -> KrausChannel:
    ops = [matrix_from_json(T) for T in obj["kraus"]]
    ch = KrausChannel(ops, check=check)
    if "n" in obj and obj["n"] != ch.n:
        raise DimensionError(f"declared n={obj['n']} but operators are {ch.n}x{ch.n}")
    return ch


def certificate_to_json(cert: RangeCertificate) -> dict:
    return {"point": _floats(cert.point), "k": cert.k, "residual": float(cert.residual),
            "isometry": matrix_to_json(cert.witness)}


def _unwrap(obj, key):
    """Accept either the bare object or a full CLI report that embeds it."""
    if isinstance(obj, dict) and "result" in obj:
        obj = obj["result"]
    if isinstance(obj, dict) and key not in obj and "certificate" in obj:
        obj = obj["certificate"]
    if not isinstance(obj, dict) or key not in obj:
        raise DimensionError(f"certificate JSON has no {key!r} field")
    return obj


def certificate_from_json(obj) -> tuple[np.ndarray, np.ndarray]:
    """``(point, isometry)``; callers re-verify rather than trusting the stored residual."""
    obj = _unwrap(obj, "isometry")
    U = matrix_from_json(obj["isometry"])
    if "k" in obj and U.shape[1] != obj["k"]:
        raise DimensionError(f"declared k={obj['k']} but isometry has {U.shape[1]} columns")
    return np.array(obj["point"], dtype=float), U


def halfspaces_to_json(H: HalfspaceSet) -> dict:
    return {"k": H.k, "entries": [{"c": _floats(c), "bound": float(b)} for c, b in H.entries]}


def halfspaces_from_json(obj) -> HalfspaceSet:
    C = np.array([e["c"] for e in obj["entries"]], dtype=float)
    b = np.array([e["bound"] for e in obj["entries"]], dtype=float)
    return HalfspaceSet(int(obj["k"]), C, b)


def code_to_json(code: CodeCertificate) -> dict:
    return {"k": code.k, "residual": float(code.residual), "gamma": matrix_to_json(code.gamma),
            "basis": matrix_to_json(code.basis)}


def code_from_json(obj) -> np.ndarray:
    obj = _unwrap(obj, "basis")
    U = matrix_from_json(obj["basis"])
    if "k" in obj and U.shape[1] != obj["k"]:
        raise DimensionError(f"declared k={obj['k']} but basis has {U.shape[1]} columns")
    return U


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True)


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
