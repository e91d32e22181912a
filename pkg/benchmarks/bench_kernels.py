"""Compare the compiled kernel backend against the pure-Python one.

Times the symmetric eigensolver and the checkpointed power sums on a
few representative sizes and prints one table row per case.  Run from
the repository root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --repeat 9 --dims 16,64,256
"""

import argparse
import statistics
import time

import numpy as np

from infinikit import _kernels, _pykernels


def _sym(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim))
    return (a + a.T) / 2.0


def _time(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dims", default="16,32,64,128")
    ap.add_argument("--cap", type=int, default=2**20,
                    help="largest checkpoint for the power sums")
    args = ap.parse_args(argv)

    if _kernels.BACKEND != "compiled":
        print("compiled backend unavailable; timing the pure backend only")
    dims = [int(d) for d in args.dims.split(",")]
    rows = []

    for dim in dims:
        m = _sym(dim, 101 + dim)
        pure = _time(lambda: _pykernels.eig_sym(m), args.repeat)
        if _kernels.BACKEND == "compiled":
            comp = _time(lambda: _kernels.eig_sym(m), args.repeat)
        else:
            comp = None
        rows.append((f"eig_sym dim={dim}", pure, comp))

    marks = [2**j for j in range(4, args.cap.bit_length())]
    for p in (-1.0, -2.0):
        pure = _time(
            lambda: _pykernels.power_checkpoint_sums(p, 0, 1, marks), args.repeat
        )
        if _kernels.BACKEND == "compiled":
            comp = _time(
                lambda: _kernels.power_checkpoint_sums(p, 0, 1, marks), args.repeat
            )
        else:
            comp = None
        rows.append((f"power sums p={p:g} cap={marks[-1]}", pure, comp))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for label, pure, comp in rows:
        if comp is None:
            print(f"{label:<{width}}  {pure * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
        else:
            print(
                f"{label:<{width}}  {pure * 1e3:>8.2f}ms  {comp * 1e3:>8.2f}ms"
                f"  {pure / comp:>7.1f}x"
            )


if __name__ == "__main__":
    main()
