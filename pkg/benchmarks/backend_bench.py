"""Benchmark the compiled stream kernel against the pure-numpy fallback.

The two backends consume the generator stream identically, so besides timing
this also cross-checks that their tallies agree bit for bit.

Usage: python benchmarks/backend_bench.py [--cycles N]
"""

import argparse
import time

import numpy as np

from cliquedec import _stream_py
from cliquedec.backend import make_geometry
from cliquedec.lattice import build
from cliquedec.rng import substream

try:
    from cliquedec import _stream
except ImportError:
    _stream = None


def bench(impl, geom, p, cycles, seed):
    t0 = time.perf_counter()
    stats = impl.classify_segment(geom, p, p, cycles, substream(seed, 0), False)
    return time.perf_counter() - t0, stats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cycles", type=lambda s: int(float(s)), default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'d':>3} {'p':>7} {'pure s':>9} {'compiled s':>11} {'speedup':>8}  agree")
    for d, p in ((5, 1e-3), (11, 5e-3), (21, 1e-2)):
        geom = make_geometry(build(d))
        t_py, s_py = bench(_stream_py, geom, p, args.cycles, args.seed)
        if _stream is None:
            print(f"{d:>3} {p:>7} {t_py:>9.2f} {'n/a':>11} {'n/a':>8}  (compiled kernel unavailable)")
            continue
        t_c, s_c = bench(_stream, geom, p, args.cycles, args.seed)
        agree = bool(
            np.array_equal(s_py.counts, s_c.counts)
            and np.array_equal(s_py.combined, s_c.combined)
        )
        print(f"{d:>3} {p:>7} {t_py:>9.2f} {t_c:>11.2f} {t_py / t_c:>7.1f}x  {agree}")


if __name__ == "__main__":
    main()
