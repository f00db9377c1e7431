"""Compare the compiled and pure-Python kernel backends.

Times ``herm_eig`` (cyclic Jacobi) and ``simplex`` (tableau pivots) on seeded
inputs and checks that both backends agree. Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import sys
import timeit

import numpy as np

from rankrange.kernels import get_backend
from rankrange.linalg import herm_eig, seeded_random
from rankrange.lp import simplex


def _available():
    names = ["python"]
    try:
        get_backend("cython")
    except ImportError:
        print("compiled backend not built; timing the fallback only", file=sys.stderr)
    else:
        names.insert(0, "cython")
    return names


def _lp_instance(seed, m=12, n=30):
    # feasible by construction: b = A x0 with x0 >= 0
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    b = A @ rng.random(n)
    return rng.standard_normal(n) ** 2, A, b


def bench(repeat: int):
    backends = _available()
    rows = []
    for n in (4, 8, 16, 32):
        M = seeded_random("hermitian", n, seed=n)
        times, values = {}, {}
        for name in backends:
            values[name] = herm_eig(M, backend=name).values
            times[name] = min(timeit.repeat(lambda: herm_eig(M, backend=name), number=1, repeat=repeat))
        agree = max(np.abs(values[b] - values[backends[0]]).max() for b in backends)
        rows.append({"kernel": "jacobi", "size": n, "seconds": times, "max_disagreement": float(agree)})
    for m, n in ((6, 15), (12, 30), (24, 60)):
        c, A, b = _lp_instance(m, m, n)
        times, optima = {}, {}
        for name in backends:
            optima[name] = simplex(c, A, b, backend=name).objective
            times[name] = min(timeit.repeat(lambda: simplex(c, A, b, backend=name), number=1, repeat=repeat))
        agree = max(abs(optima[b] - optima[backends[0]]) for b in backends)
        rows.append({"kernel": "simplex", "size": f"{m}x{n}", "seconds": times, "max_disagreement": float(agree)})
    return backends, rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="also write the rows as JSON")
    args = p.parse_args(argv)
    backends, rows = bench(args.repeat)
    header = f"{'kernel':8} {'size':>6} " + " ".join(f"{b + ' (ms)':>13}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>8}"
    print(header + f" {'disagree':>9}")
    for r in rows:
        line = f"{r['kernel']:8} {str(r['size']):>6} "
        line += " ".join(f"{1e3 * r['seconds'][b]:13.3f}" for b in backends)
        if len(backends) == 2:
            line += f" {r['seconds']['python'] / r['seconds']['cython']:7.1f}x"
        print(line + f" {r['max_disagreement']:9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
