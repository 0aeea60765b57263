"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on both backends with identical inputs; results are
checked for equality before timings are reported.
"""
import argparse
import time

import numpy as np

from ifskit import kernels
from ifskit.corpus import load_example


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(rng):
    mask1 = rng.random(2 ** 16) < 0.01
    mask2 = rng.random((512, 512)) < 0.002
    bony = load_example("bony").system
    syms = rng.integers(0, 2, size=200_000).astype(np.int64)
    prog = bony.program()
    lo, hi = bony.domain.lo, bony.domain.hi
    return {
        "edt_1d (65536 cells)": lambda: kernels.edt_1d(mask1, 1.0 / mask1.size),
        "edt_2d (512 x 512)": lambda: kernels.edt_2d(mask2, 1 / 512, 1 / 512),
        "orbit (bony, 2e5 steps)": lambda: kernels.run_orbit(np.array([0.5]), syms, *prog, lo, hi),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the fallback is available")
    rng = np.random.default_rng(0)
    work = cases(rng)
    print(f"{'kernel':28s}" + "".join(f"{b:>14s}" for b in backends) + "   speedup")
    for name, fn in work.items():
        times, outs = [], []
        for b in backends:
            prev = kernels.use_backend(b)
            try:
                t, out = _time(fn, args.repeat)
            finally:
                kernels.use_backend(prev)
            times.append(t)
            outs.append(out)
        if len(outs) == 2:
            if "edt" in name:
                same = np.allclose(outs[0], outs[1], rtol=0, atol=1e-12)
            else:
                same = np.array_equal(outs[0], outs[1])
            if not same:
                raise SystemExit(f"{name}: backends disagree")
        speed = f"{times[-1] / times[0]:9.1f}x" if len(times) == 2 else ""
        print(f"{name:28s}" + "".join(f"{t * 1e3:12.2f}ms" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
