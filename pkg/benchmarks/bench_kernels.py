"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on inputs sized like one training batch (a few hundred node
rows, hidden width 32) and like one generated graph. Results are checked for
agreement before timing.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from crcg import _kernels_py, kernels


def cases(rng):
    P = rng.normal(size=(320, 32))
    Q = rng.normal(size=(160, 32))
    # near-duplicate rows so mark_above has work to do
    Q[:40] = P[:40] + 0.01 * rng.normal(size=(40, 32))
    n = 40
    edges = np.array([(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.1], dtype=np.int64)
    X = rng.normal(size=(200, 8))
    # one stacked batch: ~650 rows, 5 classes, about half misclassified
    R = rng.normal(size=(650, 32))
    yt = rng.integers(0, 5, 650)
    yp = np.where(rng.random(650) < 0.5, yt, rng.integers(0, 5, 650))
    return {
        "row_norm_reciprocals": (P,),
        "cross_cosine": (P, Q),
        "mark_above": (P, Q, 0.8),
        "mark_batch sparse": (R, yt, yp, 0.8),
        "mark_batch dense": (np.abs(R), yt, yp, 0.5),
        "normalized_adjacency": (n, edges),
        "similarity_edges": (X, 0.5),
    }


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a), np.asarray(b), rtol=0, atol=1e-12)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args(argv)
    if "cython" not in kernels.available_backends():
        print("compiled backend not built; only the numpy backend is available")
        return 1
    from crcg import _ckernels

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for name, inputs in cases(rng).items():
        fn_name = name.split()[0]
        py_fn, c_fn = getattr(_kernels_py, fn_name), getattr(_ckernels, fn_name)
        if not same(py_fn(*inputs), c_fn(*inputs)):
            print(f"{name}: backends disagree")
            return 1
        t = {}
        for label, fn in (("python", py_fn), ("cython", c_fn)):
            best = min(timeit.repeat(lambda: fn(*inputs), number=args.number, repeat=args.repeat))
            t[label] = best / args.number * 1e6
        print(f"{name:<22} {t['python']:>10.1f} {t['cython']:>10.1f} {t['python'] / t['cython']:>7.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
