"""Benchmark the compiled nearest-codeword kernel against the numpy fallback.

Run as: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cfcsi._kernels import numpy_backend

try:
    from cfcsi._kernels import _nn as compiled
except ImportError:
    compiled = None

# (batch, dim, codebook size): pilot-column batch, EQ-estimate batch, training batch
CASES = [
    (40, 4, 256),
    (400, 4, 256),
    (4000, 4, 256),
    (20000, 8, 256),
    (4000, 2, 16),
]


def _time(fn, points, codebook, repeats):
    fn(points, codebook)  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(points, codebook)
    return (time.perf_counter() - start) / repeats


def bench_assign():
    rng = np.random.default_rng(0)
    print(f"{'batch':>7} {'dim':>4} {'size':>5} {'numpy':>12} {'cython':>12} {'speedup':>8}")
    for n, d, s in CASES:
        points = rng.normal(size=(n, d))
        codebook = rng.normal(size=(s, d))
        repeats = max(3, int(2e7 / (n * s * d)))
        t_np = _time(numpy_backend.assign_nearest, points, codebook, repeats)
        if compiled is None:
            print(f"{n:>7} {d:>4} {s:>5} {t_np * 1e3:>10.3f}ms {'n/a':>12} {'n/a':>8}")
            continue
        t_cy = _time(compiled.assign_nearest, points, codebook, repeats)
        print(f"{n:>7} {d:>4} {s:>5} {t_np * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms {t_np / t_cy:>7.1f}x")


def bench_lbg():
    import os
    import subprocess
    import sys

    code = (
        "import time, numpy as np\n"
        "from cfcsi.quantizer import lbg_train\n"
        "x = np.random.default_rng(0).normal(size=(4000, 4))\n"
        "t0 = time.perf_counter(); lbg_train(x, 256); print(time.perf_counter() - t0)\n"
    )
    print("\nlbg_train on (4000, 4) samples, 256 codewords:")
    for backend in ("numpy", "cython"):
        if backend == "cython" and compiled is None:
            print("  cython: n/a (extension not built)")
            continue
        env = dict(os.environ, CFCSI_KERNEL=backend)
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
        print(f"  {backend}: {float(out.stdout) * 1e3:.0f}ms")


if __name__ == "__main__":
    if compiled is None:
        print("compiled kernel not built; benchmarking the numpy fallback only\n")
    bench_assign()
    bench_lbg()
