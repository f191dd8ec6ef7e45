"""Compare the numba and numpy Schur-complement kernels.

Two measurements are reported for each backend:

* the raw kernel ``tr(G_i T G_j T)`` assembly on random sparse block patterns
  of increasing size, and
* complete conic solves (a diamond distance and an MIO robustness) with the
  backend switched at runtime.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

The numba kernel is compiled (and cached) before timing starts, so the figures
are steady-state costs.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from chanres import _accel
from chanres import channel as ch
from chanres.conic._kernels import BlockPattern, schur_block_numba, schur_block_numpy
from chanres.freesets import FreeSetSpec
from chanres.monotones import robustness
from chanres.norms import diamond_distance


def random_pattern(rng: np.random.Generator, dim: int, nvars: int) -> BlockPattern:
    """Symmetric coefficient pattern with a mix of light and heavy columns."""
    indptr, rows, cols, vals = [0], [], [], []
    for i in range(nvars):
        k = 3 * dim if i % 7 == 0 else int(rng.integers(1, 4))
        for _ in range(k):
            p, q = rng.integers(0, dim, size=2)
            v = rng.standard_normal()
            rows += [p, q]
            cols += [q, p]
            vals += [v, v]
        indptr.append(len(vals))
    return BlockPattern(dim, indptr, rows, cols, vals)


def best_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernel(rng, repeat: int):
    rows = []
    for dim, nvars in ((8, 64), (16, 256), (36, 800)):
        pat = random_pattern(rng, dim, nvars)
        a = rng.standard_normal((dim, dim))
        t = a @ a.T + np.eye(dim)
        out = {}
        for name, kern in (("numba", schur_block_numba), ("numpy", schur_block_numpy)):
            kern(pat, t, np.zeros((nvars, nvars)))  # warm-up / compile
            out[name] = best_time(lambda: kern(pat, t, np.zeros((nvars, nvars))), repeat)
        rows.append((f"schur dim={dim} vars={nvars} nnz={pat.nnz}", out["numba"], out["numpy"]))
    return rows


def bench_solves(rng, repeat: int):
    n3 = ch.random_channel(3, 3, rng)
    m3 = ch.random_channel(3, 3, rng)
    n2 = ch.random_channel(2, 2, rng)
    cases = [
        ("diamond distance 3->3", lambda: diamond_distance(n3, m3)),
        ("MIO robustness 2->2 eps=0.1", lambda: robustness(n2, FreeSetSpec.mio(2), 0.1)),
    ]
    rows = []
    prev = _accel.backend()
    try:
        for label, fn in cases:
            out = {}
            for name in ("numba", "numpy"):
                _accel.set_backend(name)
                fn()  # warm-up
                out[name] = best_time(fn, repeat)
            rows.append((label, out["numba"], out["numpy"]))
    finally:
        _accel.set_backend(prev)
    return rows


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is reported)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    rows = bench_kernel(rng, args.repeat) + bench_solves(rng, args.repeat)
    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'numba [s]':>10}  {'numpy [s]':>10}  {'speedup':>8}")
    for label, t_nb, t_np in rows:
        print(f"{label:<{width}}  {t_nb:10.5f}  {t_np:10.5f}  {t_np / t_nb:7.2f}x")
    print(f"(median speedup {statistics.median(r[2] / r[1] for r in rows):.2f}x)")


if __name__ == "__main__":
    main()
