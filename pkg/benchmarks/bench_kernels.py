"""Benchmark the hot RREF kernel: numba backend vs the pure-numpy fallback.

    python benchmarks/bench_kernels.py            # current backend only
    python benchmarks/bench_kernels.py --compare  # run both and tabulate

The matrices mirror the shape of the degreewise invariant computations:
stacked (action - identity) blocks for the SL3(F_3) action on K(V3*).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def bench_random(sizes, p=3, repeats=3):
    from modinv import linalg

    rows = []
    rng = np.random.default_rng(0)
    for n in sizes:
        m = rng.integers(0, p, size=(2 * n, n)).astype(np.int64)
        linalg.rank(m[: min(50, n)], p)  # warm the JIT outside the timer
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            linalg.rank(m, p)
            best = min(best, time.perf_counter() - t0)
        rows.append({"size": f"{2*n}x{n}", "seconds": best})
    return {"backend": linalg.backend(), "rows": rows}


def bench_invariants(d, p=3):
    """End-to-end: dimension of the SL3 invariants of K(V3*) in degree d."""
    from modinv import linalg
    from modinv.gca import Signature
    from modinv.groups import MatrixGroup, invariant_dimension

    sig = Signature.bv(p, 3)
    sl3 = MatrixGroup.special_linear(p, 3)
    invariant_dimension(sl3, sig, 6, full_k=True)  # warm caches
    t0 = time.perf_counter()
    dim = invariant_dimension(sl3, sig, d, full_k=True)
    return {"backend": linalg.backend(), "degree": d, "dimension": dim,
            "seconds": time.perf_counter() - t0}


def run(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    out = {"rref": bench_random(sizes), "invariants": bench_invariants(args.degree)}
    print(json.dumps(out))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="200,500,1000")
    ap.add_argument("--degree", type=int, default=48)
    ap.add_argument("--compare", action="store_true",
                    help="also run the pure-numpy fallback in a subprocess")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    if not args.compare:
        result = run(args)
        if not args.json:
            _pretty(result)
        return

    here = run_quiet(args, {})
    env = dict(os.environ, MODINV_PURE_NUMPY="1")
    other = run_quiet(args, env)
    print(f"{'case':>14} | {here['rref']['backend']:>10} | {other['rref']['backend']:>10}")
    print("-" * 42)
    for a, b in zip(here["rref"]["rows"], other["rref"]["rows"]):
        print(f"{a['size']:>14} | {a['seconds']:>9.4f}s | {b['seconds']:>9.4f}s")
    a, b = here["invariants"], other["invariants"]
    label = f"K(V3*)^SL3 d={a['degree']}"
    print(f"{label:>14} | {a['seconds']:>9.4f}s | {b['seconds']:>9.4f}s")


def run_quiet(args, env_extra):
    cmd = [sys.executable, __file__, "--sizes", args.sizes,
           "--degree", str(args.degree), "--json"]
    env = dict(os.environ)
    env.update(env_extra)
    out = subprocess.run(cmd, capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def _pretty(result):
    r = result["rref"]
    print(f"backend: {r['backend']}")
    for row in r["rows"]:
        print(f"  rref {row['size']}: {row['seconds']:.4f}s")
    inv = result["invariants"]
    print(f"  invariant dim (degree {inv['degree']}): {inv['dimension']} in {inv['seconds']:.4f}s")


if __name__ == "__main__":
    main()
