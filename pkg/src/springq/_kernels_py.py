"""Pure-numpy gate-application kernels (fallback when the Cython ext is absent).

Works on the flat amplitude array in place.  Controls are applied by basic
indexing (views), targets by moveaxis, so each gate touches only the
amplitudes it acts on.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def apply_ops(amps: np.ndarray, width: int, py_ops: list, arrays=None) -> None:
    tensor = amps.reshape((2,) * width)
    for is_swap, u, idx, axes in py_ops:
        sub = tensor[idx]
        if is_swap:
            sub = np.moveaxis(sub, axes, (0, 1))
            tmp = sub[0, 1].copy()
            sub[0, 1] = sub[1, 0]
            sub[1, 0] = tmp
        else:
            sub = np.moveaxis(sub, axes[0], 0)
            a0 = sub[0].copy()
            a1 = sub[1].copy()
            sub[0] = u[0, 0] * a0 + u[0, 1] * a1
            sub[1] = u[1, 0] * a0 + u[1, 1] * a1
