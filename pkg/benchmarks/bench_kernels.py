"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 1024,2048] [--repeat 5]
"""

import argparse
import statistics
import time

import numpy as np

from graphmark import _fallback, harness, kernels
from graphmark.scheme import EmbeddingContext, keygen
from graphmark.spectral import idft2


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1024,2048")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        raise SystemExit("compiled extension not available; build with `pip install -e . --no-build-isolation`")
    from graphmark import _kernels

    print(f"{'kernel':<22}{'N':>6}{'cython ms':>12}{'numpy ms':>12}{'speedup':>9}")
    for n in (int(x) for x in args.sizes.split(",")):
        rng = np.random.default_rng(n)
        a = np.ascontiguousarray((rng.random((n, n)) < 0.005) + idft2(rng.normal(size=(n, n)) * 40))
        threshold = 0.005
        b = _fallback.binarize_symmetric(a, threshold)
        assert (b == _kernels.binarize_symmetric(a, threshold)).all()
        for name, fast, slow in (
            ("binarize_symmetric", lambda: _kernels.binarize_symmetric(a, threshold), lambda: _fallback.binarize_symmetric(a, threshold)),
            ("upper_pairs", lambda: _kernels.upper_pairs(b), lambda: _fallback.upper_pairs(b)),
        ):
            tf, ts = _best(fast, args.repeat), _best(slow, args.repeat)
            print(f"{name:<22}{n:>6}{tf * 1e3:>12.1f}{ts * 1e3:>12.1f}{ts / tf:>8.1f}x")

    # whole embedding at the default desk reduction size
    g = harness.generate("ba", 50_000, {"a": 3}, 0)
    ctx = EmbeddingContext(g, 1024)
    key = keygen(210, 256.0, 0)
    t_fast = _best(lambda: ctx.embed(key), args.repeat)
    saved = kernels._impl
    kernels._impl = _fallback
    try:
        t_slow = _best(lambda: ctx.embed(key), args.repeat)
    finally:
        kernels._impl = saved
    print(f"{'embed (n=50k, n0=1024)':<22}{1024:>6}{t_fast * 1e3:>12.1f}{t_slow * 1e3:>12.1f}{t_slow / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
