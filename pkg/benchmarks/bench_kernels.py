"""Compare the numba-compiled kernels against the pure-Python fallback.

Runs the same workloads twice in subprocesses, once normally and once
with H1LOC_NO_NUMBA=1, and prints a timing table.  Expect two to four
orders of magnitude between the columns on the closure and elimination
workloads.

Usage: python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKLOAD = textwrap.dedent(
    """
    import json, time
    import numpy as np
    from h1loc._kernels import closure_packed, howell_core, cocycle_search, NUMBA_ENABLED
    from h1loc.residues import PrimePowerModulus
    from h1loc.matgroup import Mat2

    quick = {quick}
    results = {{}}

    def timed(name, fn, repeat=3):
        best = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        results[name] = best

    mod = PrimePowerModulus(5, 2)
    gens = np.array([
        Mat2(mod, 7, 0, 0, 1).packed,
        Mat2(mod, 1, 1, 0, 1).packed,
        Mat2(mod, 1, 0, 5, 1).packed,
    ], dtype=np.int64)
    closure_packed(gens[:1], 25, 10)  # warm the JIT outside timing
    timed("closure_12500", lambda: closure_packed(gens, 25, 50000))

    rng = np.random.default_rng(0)
    rows = 40 if quick else 120
    mat = rng.integers(0, 25, size=(rows, 2 * rows)).astype(np.int64)
    howell_core(mat[:2, :4].copy(), 25, 5, 2)
    timed("howell_%dx%d" % (rows, 2 * rows), lambda: howell_core(mat, 25, 5, 2))

    m3 = PrimePowerModulus(3, 2)
    selems, cnt = closure_packed(np.array([
        Mat2(m3, 2, 0, 0, 1).packed, Mat2(m3, 1, 1, 0, 1).packed,
    ], dtype=np.int64), 9, 2000)
    selems = selems[:cnt].copy()
    sgens = np.array([Mat2(m3, 2, 0, 0, 1).packed, Mat2(m3, 1, 1, 0, 1).packed],
                     dtype=np.int64)
    cocycle_search(selems, sgens, 9, 1 << 14)
    timed("cocycle_search_%d" % cnt, lambda: cocycle_search(selems, sgens, 9, 1 << 14))

    print(json.dumps({{"numba": bool(NUMBA_ENABLED), "timings": results}}))
    """
)


def run(env_extra: dict, quick: bool) -> dict:
    env = dict(os.environ, **env_extra)
    out = subprocess.run(
        [sys.executable, "-c", WORKLOAD.format(quick=quick)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    fast = run({"H1LOC_NO_NUMBA": ""}, args.quick)
    slow = run({"H1LOC_NO_NUMBA": "1"}, args.quick)
    assert fast["numba"] and not slow["numba"]
    print(f"{'workload':<24}{'numba':>12}{'fallback':>14}{'speedup':>10}")
    for name, t in fast["timings"].items():
        ts = slow["timings"][name]
        print(f"{name:<24}{t * 1e3:>10.2f}ms{ts * 1e3:>12.2f}ms{ts / t:>9.1f}x")


if __name__ == "__main__":
    main()
