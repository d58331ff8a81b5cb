"""Micro-benchmark comparing the jitted and pure-numpy kernel backends.

Run as ``python3 -m jsrkit.benchmark``.  The backend is chosen at import
time from the JSRKIT_NO_NUMBA environment variable, so this script times
the two kernels in a subprocess per backend and prints a small table.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import time

import numpy as np

_SNIPPET = r"""
import math, time
import numpy as np
from jsrkit import _kernels

rng = np.random.default_rng(0)
m = 2048
theta = 2.0 * math.pi * np.arange(m) / m
vx = np.cos(theta)
vy = np.sin(theta)
q = rng.normal(size=(200000, 2))

# warm-up (includes any jit compilation)
_kernels.polygon_gauge(q[:100, 0], q[:100, 1], vx, vy)
t0 = time.perf_counter()
for _ in range(5):
    _kernels.polygon_gauge(q[:, 0], q[:, 1], vx, vy)
gauge_s = (time.perf_counter() - t0) / 5

stack = rng.normal(size=(2, 2, 2)) + 0j
symbols = rng.integers(1, 3, size=100000).astype(np.int64)
_kernels.product_log_norm(stack, symbols[:100])
t0 = time.perf_counter()
for _ in range(5):
    _kernels.product_log_norm(stack, symbols)
prod_s = (time.perf_counter() - t0) / 5

print(f"{_kernels.backend_name()} {gauge_s:.6f} {prod_s:.6f}")
"""


def run_backend(no_numba: bool) -> tuple:
    env = dict(os.environ)
    if no_numba:
        env["JSRKIT_NO_NUMBA"] = "1"
    else:
        env.pop("JSRKIT_NO_NUMBA", None)
    out = subprocess.run(
        [sys.executable, "-c", _SNIPPET], env=env, capture_output=True, text=True
    )
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    name, gauge_s, prod_s = out.stdout.split()[-3:]
    return name, float(gauge_s), float(prod_s)


def main() -> None:
    rows = [run_backend(no_numba=False), run_backend(no_numba=True)]
    print(f"{'backend':<8} {'polygon_gauge [s]':>18} {'product_log_norm [s]':>22}")
    for name, gauge_s, prod_s in rows:
        print(f"{name:<8} {gauge_s:>18.6f} {prod_s:>22.6f}")
    if rows[0][0] != "numba":
        print("note: numba backend unavailable; both rows used numpy")


if __name__ == "__main__":
    main()
