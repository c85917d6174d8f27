"""Timing comparison of the pure-numpy and compiled sweep kernels.

Runs min_sweep and overlap_sweep on random inputs for a few space shapes
and reports per-call wall time for each backend. The compiled module is
skipped when it is not importable.
"""

import argparse
import time

import numpy as np

from sepdisc.kernels import HAVE_COMPILED, _pure

if HAVE_COMPILED:
    from sepdisc.kernels import _core
else:
    _core = None

SHAPES = {
    "2x2": (2, 2),
    "3x3": (3, 3),
    "2x2x2": (2, 2, 2),
    "3x3x3": (3, 3, 3),
    "9x9": (9, 9),
}


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def random_locals(rng, dims):
    out = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out.append(v / np.linalg.norm(v))
    return out


def bench_min_sweep(kernel, ops, starts, dims, max_iters):
    t0 = time.perf_counter()
    vals = []
    for op, locs in zip(ops, starts, strict=True):
        value, _, _, _ = kernel.min_sweep(op, dims, locs, max_iters, 1e-12)
        vals.append(value)
    return time.perf_counter() - t0, vals


def bench_overlap_sweep(kernel, psis, starts, dims, max_iters):
    t0 = time.perf_counter()
    vals = []
    for psi, locs in zip(psis, starts, strict=True):
        value, _, _, _ = kernel.overlap_sweep(psi, dims, locs, max_iters, 1e-12)
        vals.append(value)
    return time.perf_counter() - t0, vals


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--calls", type=int, default=200, help="calls per backend")
    parser.add_argument("--max-iters", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print("backend availability: compiled=%s" % HAVE_COMPILED)
    header = "%-8s %-14s %12s %12s %9s" % ("shape", "kernel", "pure (ms)", "core (ms)", "speedup")
    print(header)
    print("-" * len(header))

    for name, dims in SHAPES.items():
        total = int(np.prod(dims))
        ops = [random_hermitian(rng, total) for _ in range(args.calls)]
        psis = [
            (lambda v: v / np.linalg.norm(v))(
                rng.standard_normal(total) + 1j * rng.standard_normal(total)
            )
            for _ in range(args.calls)
        ]
        starts = [random_locals(rng, dims) for _ in range(args.calls)]

        t_pure, v_pure = bench_min_sweep(_pure, ops, starts, dims, args.max_iters)
        row = [name, "min_sweep", "%12.3f" % (1e3 * t_pure / args.calls)]
        if _core is not None:
            t_core, v_core = bench_min_sweep(_core, ops, starts, dims, args.max_iters)
            drift = max(abs(a - b) for a, b in zip(v_pure, v_core))
            row += ["%12.3f" % (1e3 * t_core / args.calls), "%8.1fx" % (t_pure / t_core)]
            if drift > 1e-7:
                row.append("  value drift %.2e" % drift)
        else:
            row += ["%12s" % "-", "%9s" % "-"]
        print("%-8s %-14s %s" % (row[0], row[1], " ".join(row[2:])))

        t_pure, v_pure = bench_overlap_sweep(_pure, psis, starts, dims, args.max_iters)
        row = [name, "overlap_sweep", "%12.3f" % (1e3 * t_pure / args.calls)]
        if _core is not None:
            t_core, v_core = bench_overlap_sweep(_core, psis, starts, dims, args.max_iters)
            drift = max(abs(a - b) for a, b in zip(v_pure, v_core))
            row += ["%12.3f" % (1e3 * t_core / args.calls), "%8.1fx" % (t_pure / t_core)]
            if drift > 1e-7:
                row.append("  value drift %.2e" % drift)
        else:
            row += ["%12s" % "-", "%9s" % "-"]
        print("%-8s %-14s %s" % (row[0], row[1], " ".join(row[2:])))


if __name__ == "__main__":
    main()
