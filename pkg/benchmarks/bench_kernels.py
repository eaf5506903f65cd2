"""Compare the numba and numpy Toeplitz kernels on typical line batches.

Run with ``python benchmarks/bench_kernels.py``. The first numba call
includes compilation and is reported separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fracvec import kernels
from fracvec.frac1d import caputo_along, rl_weights


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    print(f"numba available: {kernels.HAS_NUMBA}")

    if kernels.HAS_NUMBA:
        c = rl_weights(64, 0.5)[0]
        t0 = time.perf_counter()
        kernels.toeplitz_apply(c, rng.standard_normal((64, 4)), backend="numba")
        print(f"numba first call (compile or cache load): {time.perf_counter() - t0:.3f} s")

    print(f"{'case':>28s} " + " ".join(f"{b:>12s}" for b in backends))
    for m, lines in ((1024, 1), (48, 48 * 48), (128, 128 * 16), (4096, 4), (16384, 4)):
        c = rl_weights(m, 0.5)[0]
        v = rng.standard_normal((m, lines))
        times = [
            _best(lambda b=b: kernels.toeplitz_apply(c, v, backend=b), args.repeat)
            for b in backends
        ]
        ref = kernels.toeplitz_apply(c, v, backend="numpy")
        for b in backends[1:]:
            err = np.max(np.abs(kernels.toeplitz_apply(c, v, backend=b) - ref))
            assert err <= 1e-10 * max(1.0, np.max(np.abs(ref))), (b, err)
        label = f"toeplitz m={m} lines={lines}"
        print(f"{label:>28s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times))

    cube = rng.standard_normal((48, 48, 48))
    times = [
        _best(lambda b=b: caputo_along(cube, 1.0 / 47, 0.5, axis=1, backend=b), args.repeat)
        for b in backends
    ]
    label = "caputo 48^3 along y"
    print(f"{label:>28s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times))


if __name__ == "__main__":
    main()
