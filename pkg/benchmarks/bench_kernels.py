"""Compare the pure-Python and compiled linear-algebra kernels.

Times the three primitives the verifier leans on, at the shapes the
reference codes actually produce, and prints the speedup.  Run:

    python3 benchmarks/bench_kernels.py [--trials N]
"""

import argparse
import random
import time

from rgc import _kernel_py

try:
    from rgc import _kernel_c
except ImportError:
    _kernel_c = None


def _flat(rng, rows, cols, q):
    return [rng.randrange(q) for _ in range(rows * cols)]


def _time(fn, trials):
    best = float("inf")
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(trials):
    q = 40577
    rng = random.Random(7)
    cases = []

    # rank at the verifier's working shape (one erasure-set check)
    a = _flat(rng, 168, 161, q)
    cases.append(("mat_rank 168x161", lambda k: k.mat_rank(
        list(a), 168, 161, q)))

    # square multiply at the decoder's shape
    b = _flat(rng, 161, 161, q)
    c = _flat(rng, 161, 161, q)
    cases.append(("mat_mul 161x161", lambda k: k.mat_mul(
        list(b), 161, 161, list(c), 161, 161, q)))

    # dense solve as used by reconstruction
    while True:
        m = _flat(rng, 120, 120, q)
        if _kernel_py.mat_rank(list(m), 120, 120, q) == 120:
            break
    rhs = _flat(rng, 120, 4, q)
    cases.append(("mat_solve 120x120", lambda k: k.mat_solve(
        list(m), 120, 120, list(rhs), 4, q)))

    print(f"{'operation':<22}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for name, fn in cases:
        t_py = _time(lambda: fn(_kernel_py), trials)
        if _kernel_c is None:
            print(f"{name:<22}{t_py * 1e3:>10.2f}ms{'n/a':>12}{'n/a':>10}")
            continue
        got_py = fn(_kernel_py)
        got_c = fn(_kernel_c)
        if got_py != got_c:
            raise SystemExit(f"backend mismatch on {name}")
        t_c = _time(lambda: fn(_kernel_c), trials)
        print(f"{name:<22}{t_py * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms"
              f"{t_py / t_c:>9.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5,
                        help="repetitions per case; best time wins")
    args = parser.parse_args()
    if _kernel_c is None:
        print("compiled kernel unavailable; timing pure Python only")
    bench(args.trials)


if __name__ == "__main__":
    main()
