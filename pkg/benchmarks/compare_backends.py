"""Compare the numba and numpy tracking kernels on a map-sized workload.

Run:  python3 benchmarks/compare_backends.py [--rows 401] [--cols 701]
The numba path is also timed cold (first call, includes JIT) and warm.
"""

import argparse
import time

import numpy as np

from pmhybrid import _kernels


def workload(rows: int, cols: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    re = np.cumsum(rng.normal(0.0, 0.05, size=(rows, cols)), axis=1)
    im = -np.abs(rng.normal(0.02, 0.01, size=(rows, cols)))
    theta = re + 1j * im
    zy = (2j * np.sin(theta / 2.0)) ** 2
    return np.ascontiguousarray(2.0 * np.arcsin(np.sqrt(zy) / 2j))


def bench(fn, arr: np.ndarray, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(arr)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=401)
    ap.add_argument("--cols", type=int, default=701)
    ap.add_argument("--repeats", type=int, default=7)
    args = ap.parse_args()

    arr = workload(args.rows, args.cols)
    print(f"grid {args.rows} x {args.cols}, active backend: "
          f"{_kernels.backend_name()}")

    t_numpy = bench(_kernels.track_theta_numpy, arr, args.repeats)
    print(f"numpy fallback : {t_numpy * 1e3:9.3f} ms")

    if _kernels.backend_name() == "numba":
        t0 = time.perf_counter()
        out = _kernels.track_theta(arr)
        t_cold = time.perf_counter() - t0
        t_warm = bench(_kernels.track_theta, arr, args.repeats)
        ref = _kernels.track_theta_numpy(arr)
        match = "bit-identical" if np.array_equal(out, ref) else "MISMATCH"
        print(f"numba cold     : {t_cold * 1e3:9.3f} ms (includes JIT)")
        print(f"numba warm     : {t_warm * 1e3:9.3f} ms "
              f"({t_numpy / t_warm:5.1f}x vs numpy, {match})")
    else:
        print("numba backend unavailable; set PMHYBRID_BACKEND=numba to "
              "require it")


if __name__ == "__main__":
    main()
