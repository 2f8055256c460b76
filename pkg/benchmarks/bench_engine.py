"""Benchmark: Cython statevector kernel vs the pure-numpy fallback.

Applies the same compiled circuit (an L-shift ladder interleaved with
controlled rotations, the gate mix the evolution circuits are made of) at
several widths and reports per-gate timings for both backends.

Run:  python3 benchmarks/bench_engine.py
"""
import time

import numpy as np

from springq import _kernels_py
from springq.circuit import Circuit
from springq.engine import _compile, backend_name
from springq.incidence import l_shift_gates

try:
    from springq import _kernels

    HAVE_CYTHON = True
except ImportError:
    _kernels = None
    HAVE_CYTHON = False


def build_workload(width: int, repeats: int) -> Circuit:
    c = Circuit(width)
    for r in range(repeats):
        c.extend(l_shift_gates(list(range(width))))
        for q in range(width - 1):
            c.ry(0.1 * (q + 1), q, [(q + 1, 1)])
        c.rz(0.3, 0, [(1, 0), (2, 1)])
        c.swap(0, width - 1, [(1, 1)])
    return c


def time_backend(kernel, amps, width, py_ops, arrays, reps=3) -> float:
    best = float("inf")
    for _ in range(reps):
        work = amps.copy()
        start = time.perf_counter()
        kernel.apply_ops(work, width, py_ops, arrays)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    print(f"selected backend: {backend_name()}")
    print(f"{'width':>6} {'gates':>7} {'python':>12} {'cython':>12} {'speedup':>8}")
    for width in (8, 10, 12, 14):
        c = build_workload(width, repeats=40)
        py_ops, arrays = _compile(c)
        rng = np.random.default_rng(0)
        amps = rng.normal(size=2**width) + 1j * rng.normal(size=2**width)
        amps /= np.linalg.norm(amps)

        t_py = time_backend(_kernels_py, amps, width, py_ops, arrays)
        if HAVE_CYTHON:
            t_cy = time_backend(_kernels, amps, width, py_ops, arrays)
            # correctness: both kernels agree bit-for-bit-close
            a, b = amps.copy(), amps.copy()
            _kernels_py.apply_ops(a, width, py_ops, arrays)
            _kernels.apply_ops(b, width, py_ops, arrays)
            assert np.allclose(a, b, atol=1e-12)
            print(
                f"{width:>6} {len(c.gates):>7} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms "
                f"{t_py / t_cy:>7.1f}x"
            )
        else:
            print(f"{width:>6} {len(c.gates):>7} {t_py * 1e3:>10.2f}ms {'n/a':>12} {'-':>8}")


if __name__ == "__main__":
    main()
