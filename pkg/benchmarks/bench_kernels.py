"""Compare the compiled kernels with the pure-Python fallback.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]``

Both backends run the same inputs; the script checks that their outputs
agree and prints the best-of-N wall time per kernel and the speedup. An
end-to-end row times a full tracking solve with each backend.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from trackflow import _pykernels

try:
    from trackflow import _ckernels
except ImportError:
    _ckernels = None


def random_csr(rng, n, deg, negative=False):
    tails = np.repeat(np.arange(n), deg)
    heads = rng.integers(0, n, size=tails.size)
    keep = tails != heads
    tails, heads = tails[keep], heads[keep]
    if negative:
        # a DAG (tail < head) may carry negative costs without cycles
        lo, hi = np.minimum(tails, heads), np.maximum(tails, heads)
        tails, heads = lo, hi
        cost = rng.uniform(-5.0, 10.0, size=tails.size)
    else:
        cost = rng.uniform(0.0, 10.0, size=tails.size)
    order = np.lexsort((heads, tails))
    tails, heads, cost = tails[order], heads[order], cost[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, tails + 1, 1)
    indptr = np.cumsum(indptr)
    cap = np.ones(tails.size)
    return indptr, heads.astype(np.int64), cost.astype(np.float64), cap


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, (int, np.integer)):
        return int(a) == int(b)
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(rng):
    g = random_csr(rng, 2000, 6, negative=True)
    yield "bellman_ford n=2000", "bellman_ford", g + (0,)
    g = random_csr(rng, 20000, 6)
    yield "dijkstra n=20000", "dijkstra", g + (0,)
    yield "hungarian 150x150", "hungarian", (rng.uniform(0, 100, size=(150, 150)),)


def end_to_end(pure: bool) -> float:
    code = ("import time;from trackflow.sim import generate,perturb,PerturbationSpec;"
            "from trackflow.trackgraph import build,solve_tracking;"
            "ds=perturb(generate(40,100,seed=0),PerturbationSpec(0.1,seed=0));"
            "g=build(ds.detections);t=time.perf_counter();solve_tracking(g);"
            "print(time.perf_counter()-t)")
    env = dict(os.environ)
    env["TRACKFLOW_PURE"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}  agree")
    for label, name, inputs in cases(rng):
        tp, op = best_time(lambda: getattr(_pykernels, name)(*inputs), args.repeat)
        tc, oc = best_time(lambda: getattr(_ckernels, name)(*inputs), args.repeat)
        print(f"{label:<24}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}  {same(op, oc)}")
    tp, tc = end_to_end(True), end_to_end(False)
    print(f"{'solve_tracking 40x100':<24}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}  -")
    return 0


if __name__ == "__main__":
    sys.exit(main())
