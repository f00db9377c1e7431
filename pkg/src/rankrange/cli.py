"""Command-line interface.

Every command prints one JSON document carrying the package version, SHA-256
digests of its input files and the full parsed configuration. Exit status is
0 on success, 2 when the computation ran but the result is a verified
failure (no code found, witness rejected), and 1 on errors, which are
reported as a single-line JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, io
from .channel import KrausChannel
from .errors import RankRangeError
from .geometry import (
    check_against_halfspaces,
    outer_halfspaces,
    sample_inner,
    sphere_family,
    star_segment_rank_1,
    star_segment_rank_k,
)
from .kernels import BACKEND
from .linalg import HermitianTuple
from .qec import BUILTIN, builtin_channel, find_code, verify_code
from .rank_k import VERIFY_TOL, membership_solve, single_matrix_interval, verify_point
from .tverberg import construct_point

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class _Inputs:
    """Loads input files once and remembers their digests for the report."""

    def __init__(self):
        self.digests = {}

    def json(self, path):
        with open(path, "rb") as fh:
            data = fh.read()
        self.digests[path] = io.digest(data)
        return json.loads(data)


def _positive(kind):
    def parse(text):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get("RANKRANGE_WORKERS")
    return int(env) if env else 1


def _certificate_report(cert) -> dict:
    out = io.certificate_to_json(cert)
    out["accepted"] = bool(cert.accepted)
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_range(args, inputs):
    A = io.tuple_from_json(inputs.json(args.tuple))
    H = outer_halfspaces(A, args.k, args.directions, args.seed)
    if args.check:
        point, U = io.certificate_from_json(inputs.json(args.check))
        cert = verify_point(A, U, args.tol, point=point)
        slack = check_against_halfspaces(H, cert.point)
        ok = cert.accepted and slack.consistent
        return {"check": _certificate_report(cert), "min_slack": slack.min_slack}, ok
    certs = sample_inner(A, args.k, args.samples, args.seed, tol=args.tol)
    slacks = [check_against_halfspaces(H, c.point).min_slack for c in certs]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"a{j + 1}" for j in range(A.m)] + ["residual"])
            for c in certs:
                w.writerow([repr(float(x)) for x in c.point] + [repr(c.residual)])
    result = {
        "halfspaces": io.halfspaces_to_json(H),
        "samples": [{"point": c.point.tolist(), "residual": c.residual, "min_slack": s}
                    for c, s in zip(certs, slacks)],
        "sampled": len(certs),
        "requested": args.samples,
        "min_slack": min(slacks) if slacks else None,
    }
    return result, True


def cmd_construct(args, inputs):
    A = io.tuple_from_json(inputs.json(args.tuple))
    cert = construct_point(A, args.k, args.tol)
    return {"certificate": _certificate_report(cert)}, cert.accepted


def _load_channel(args, inputs) -> KrausChannel:
    if args.channel:
        return io.channel_from_json(inputs.json(args.channel))
    params = dict(kv.split("=", 1) for kv in args.param)
    return builtin_channel(args.builtin, params).channel


def cmd_find_code(args, inputs):
    ch = _load_channel(args, inputs)
    res = find_code(ch, args.k, seed=args.seed, restarts=args.restarts, tol=args.tol,
                    workers=_workers(args))
    out = {"success": res.success, "best_residual": res.best_residual, "method": res.method,
           "reduced_m": res.reduced_m}
    if res.certificate is not None:
        out["certificate"] = io.code_to_json(res.certificate)
    return out, res.success


def cmd_verify_code(args, inputs):
    ch = _load_channel(args, inputs)
    U = io.code_from_json(inputs.json(args.code))
    code = verify_code(ch, U, args.tol)
    return {"accepted": code.accepted, "certificate": io.code_to_json(code)}, code.accepted


def cmd_starshape(args, inputs):
    A = io.tuple_from_json(inputs.json(args.tuple))
    if args.center:
        point, U = io.certificate_from_json(inputs.json(args.center))
        center = verify_point(A, U, args.tol, point=point)
    else:
        center = construct_point(A, args.center_rank, args.tol)
    if not center.accepted:
        return {"error": "center certificate rejected", "center": _certificate_report(center)}, False
    ts = np.linspace(0.0, 1.0, args.samples)
    if args.vector:
        x = np.asarray(io.matrix_from_json(inputs.json(args.vector))).ravel()
        seg = star_segment_rank_1(A, center, x, ts, args.tol)
    else:
        if args.tip:
            point, U = io.certificate_from_json(inputs.json(args.tip))
            tip = verify_point(A, U, args.tol, point=point)
        else:
            tips = sample_inner(A, args.tip_rank, 1, args.seed, tol=args.tol)
            if not tips:
                return {"error": "no tip found by sampling"}, False
            tip = tips[0]
        seg = star_segment_rank_k(A, center, tip, ts, args.tol)
    out = {
        "center": _certificate_report(center),
        "tip": _certificate_report(seg.tip),
        "samples": [{"t": t, "point": c.point.tolist(), "residual": c.residual,
                     "accepted": bool(c.accepted)} for t, c in seg.samples],
        "verified": sum(c.accepted for _, c in seg.samples),
    }
    if seg.case is not None:
        out["case"] = seg.case
        out["first_row_rank"] = seg.first_row_rank
    return out, seg.all_verified


def cmd_sphere_demo(args, inputs):
    A, witness = sphere_family(args.k)
    rng = np.random.default_rng(args.seed)
    pts = rng.standard_normal((args.points, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    residuals = [verify_point(A, witness(a), 1e-12, point=a).residual for a in pts]
    verified = int(sum(r <= 1e-12 for r in residuals))
    inner = []
    for i in range(args.interior):
        d = rng.standard_normal(3)
        a = 0.8 * rng.random() ** (1 / 3) * d / np.linalg.norm(d)
        res = membership_solve(A, a, args.k, restarts=args.restarts, seed=args.seed + i,
                               workers=_workers(args))
        inner.append({"point": a.tolist(), "success": res.success, "best_residual": res.best_residual})
    out = {
        "witnesses_verified": verified,
        "witnesses_total": args.points,
        "max_witness_residual": max(residuals) if residuals else 0.0,
        "interior_trials": inner,
        "interior_all_failed": all(not t["success"] for t in inner),
    }
    return out, verified == args.points and out["interior_all_failed"]


def cmd_oracle_interval(args, inputs):
    if args.diag:
        A1 = np.diag([float(x) for x in args.diag.split(",")])
    else:
        obj = inputs.json(args.matrix)
        A1 = io.tuple_from_json(obj)[0] if "matrices" in obj else io.matrix_from_json(obj)
    iv = single_matrix_interval(A1, args.k)
    out = {"interval": None if iv.empty else [iv.lo, iv.hi], "empty": iv.empty}
    if not iv.empty:
        A = HermitianTuple([A1])
        values = {"lo": iv.lo, "mid": (iv.lo + iv.hi) / 2, "hi": iv.hi}
        out["witness_residuals"] = {
            name: verify_point(A, U, args.tol, point=[values[name]]).residual
            for name, U in iv.witnesses.items()
        }
    return out, True


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rankrange", description="Joint rank-k numerical ranges and error-correcting codes.")
    p.add_argument("--version", action="version", version=f"rankrange {__version__}")
    shared = _Parser(add_help=False)
    shared.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    shared.add_argument("--workers", type=_positive(int), default=None,
                        help="parallel restart chunks (default: $RANKRANGE_WORKERS or 1)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[shared], **kw)

    sub.add_parser = add_parser

    def common(sp, tol=VERIFY_TOL):
        sp.add_argument("--tol", type=_positive(float), default=tol, help=f"acceptance tolerance (default {tol})")

    sp = sub.add_parser("range", help="outer half-spaces plus sampled inner points")
    sp.add_argument("--tuple", required=True, help="tuple JSON {'matrices': [...]}")
    sp.add_argument("--k", type=_positive(int), required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--samples", type=_positive(int), default=100)
    sp.add_argument("--directions", type=_positive(int), default=512)
    sp.add_argument("--csv", help="also write sampled points as CSV")
    sp.add_argument("--check", help="re-verify a certificate JSON instead of sampling")
    common(sp)
    sp.set_defaults(func=cmd_range)

    sp = sub.add_parser("construct", help="certified point when n >= (k-1)(m+1)^2")
    sp.add_argument("--tuple", required=True)
    sp.add_argument("--k", type=_positive(int), required=True)
    common(sp)
    sp.set_defaults(func=cmd_construct)

    for name, func, help_ in (("find-code", cmd_find_code, "search for a k-dimensional code"),
                              ("verify-code", cmd_verify_code, "check the Knill-Laflamme condition")):
        sp = sub.add_parser(name, help=help_,
                            description="Built-in multi-qubit channels place qubit 1 in the most "
                                        "significant tensor factor (X1 = X (x) I (x) I).")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--channel", help="channel JSON {'n': n, 'kraus': [...]}")
        src.add_argument("--builtin", choices=sorted(BUILTIN))
        sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="parameter for --builtin, e.g. p=0.3")
        if name == "find-code":
            sp.add_argument("--k", type=_positive(int), required=True)
            sp.add_argument("--seed", type=int, required=True)
            sp.add_argument("--restarts", type=_positive(int), default=50)
            common(sp, 1e-6)
        else:
            sp.add_argument("--code", required=True, help="code certificate JSON")
            common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("starshape", help="certify a star segment from a center")
    sp.add_argument("--tuple", required=True)
    c = sp.add_mutually_exclusive_group(required=True)
    c.add_argument("--center", help="center certificate JSON")
    c.add_argument("--center-rank", type=_positive(int), help="build the center constructively at this rank")
    t = sp.add_mutually_exclusive_group()
    t.add_argument("--tip", help="tip certificate JSON (rank-k segment)")
    t.add_argument("--vector", help="unit vector JSON as a 1-column matrix (rank-1 segment)")
    sp.add_argument("--tip-rank", type=_positive(int), default=1, help="rank of a sampled tip")
    sp.add_argument("--samples", type=_positive(int), default=21)
    sp.add_argument("--seed", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_starshape)

    sp = sub.add_parser("sphere-demo", help="closed-form witnesses on the sphere family")
    sp.add_argument("--k", type=_positive(int), required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--points", type=_positive(int), default=100)
    sp.add_argument("--interior", type=int, default=5, help="interior points to try (expected to fail)")
    sp.add_argument("--restarts", type=_positive(int), default=50)
    sp.set_defaults(func=cmd_sphere_demo)

    sp = sub.add_parser("oracle-interval", help="rank-k range of one Hermitian matrix")
    m = sp.add_mutually_exclusive_group(required=True)
    m.add_argument("--matrix", help="matrix JSON or one-matrix tuple JSON")
    m.add_argument("--diag", help="comma-separated diagonal, e.g. 1,2,3")
    sp.add_argument("--k", type=_positive(int), required=True)
    common(sp, 1e-9)
    sp.set_defaults(func=cmd_oracle_interval)
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        inputs = _Inputs()
        result, ok = args.func(args, inputs)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}))
        return EXIT_ERROR
    except (RankRangeError, ValueError, KeyError, TypeError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_ERROR
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    report = {
        "version": __version__,
        "backend": BACKEND,
        "command": args.command,
        "config": config,
        "inputs": inputs.digests,
        "status": "ok" if ok else "failed",
        "result": result,
    }
    _emit(io.dumps(report), args.output)
    return EXIT_OK if ok else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
