"""Dense complex statevector simulation of circuits.

Applies circuits gate-by-gate without materializing the full unitary,
projects ancilla registers, and extracts the encoded block of a circuit.
The hot kernel is the compiled Cython extension when available; set
``SPRINGQ_BACKEND=python`` to force the numpy fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit

UNITARITY_TOL = 1e-10
BLOCK_TOL = 1e-10

if os.environ.get("SPRINGQ_BACKEND", "auto") == "python":
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _kernels


def backend_name() -> str:
    return _kernels.BACKEND


_SQ2 = 1.0 / np.sqrt(2.0)
_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "V": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    "VDG": np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex) / 2,
}


def gate_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    if kind in _FIXED:
        return _FIXED[kind]
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise ValueError(f"no 2x2 matrix for kind {kind}")


@dataclass
class StateVector:
    width: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.width, self.amplitudes.copy())


@dataclass
class AncillaOutcome:
    probability: float
    post_state: StateVector


def zero_state(width: int) -> StateVector:
    amps = np.zeros(2**width, dtype=complex)
    amps[0] = 1.0
    return StateVector(width, amps)


def basis_state(width: int, index: int) -> StateVector:
    amps = np.zeros(2**width, dtype=complex)
    amps[index] = 1.0
    return StateVector(width, amps)


def from_amplitudes(amps: np.ndarray) -> StateVector:
    amps = np.asarray(amps, dtype=complex).ravel()
    width = int(np.log2(len(amps)))
    if 2**width != len(amps):
        raise ValueError(f"amplitude count {len(amps)} is not a power of two")
    return StateVector(width, amps)


def _compile(c: Circuit):
    """Per-circuit cached compilation to backend op descriptors."""
    cached = getattr(c, "_compiled", None)
    if cached is not None and cached[0] == len(c.gates):
        return cached[1], cached[2]

    width = c.width
    bit = lambda q: width - 1 - q
    py_ops = []
    kinds = np.zeros(len(c.gates), dtype=np.int8)
    us = np.zeros((len(c.gates), 2, 2), dtype=complex)
    tsh1 = np.zeros(len(c.gates), dtype=np.int64)
    tsh2 = np.zeros(len(c.gates), dtype=np.int64)
    cval = np.zeros(len(c.gates), dtype=np.int64)
    fmask = np.zeros(len(c.gates), dtype=np.int64)

    for g_i, g in enumerate(c.gates):
        idx: list = [slice(None)] * width
        for q, pol in g.controls:
            idx[q] = pol
        ctrl_wires = sorted(q for q, _ in g.controls)
        axes = tuple(
            t - sum(1 for q in ctrl_wires if q < t) for t in g.targets
        )
        is_swap = g.kind == "SWAP"
        u = None if is_swap else gate_matrix(g.kind, g.angle)
        py_ops.append((is_swap, u, tuple(idx), axes))

        kinds[g_i] = 1 if is_swap else 0
        if not is_swap:
            us[g_i] = u
            tsh1[g_i] = bit(g.targets[0])
        else:
            tsh1[g_i] = bit(g.targets[0])
            tsh2[g_i] = bit(g.targets[1])
        used = 0
        for t in g.targets:
            used |= 1 << bit(t)
        for q, pol in g.controls:
            used |= 1 << bit(q)
            if pol == 1:
                cval[g_i] |= 1 << bit(q)
        fmask[g_i] = (2**width - 1) & ~used

    arrays = (kinds, us, tsh1, tsh2, cval, fmask)
    c._compiled = (len(c.gates), py_ops, arrays)  # type: ignore[attr-defined]
    return py_ops, arrays


def apply_inplace(c: Circuit, amps: np.ndarray) -> None:
    if len(amps) != 2**c.width:
        raise ValueError(f"state dim {len(amps)} does not match width {c.width}")
    if amps.dtype != np.complex128 or not amps.flags.c_contiguous:
        raise ValueError("apply_inplace needs a C-contiguous complex128 array")
    py_ops, arrays = _compile(c)
    _kernels.apply_ops(amps, c.width, py_ops, arrays)


def apply(c: Circuit, s: StateVector) -> StateVector:
    """matrix(c) @ s, computed gate-by-gate; norm preserved."""
    if c.width != s.width:
        raise ValueError(f"circuit width {c.width} != state width {s.width}")
    out = s.amplitudes.astype(complex, copy=True)
    apply_inplace(c, out)
    return StateVector(s.width, out)


def project_ancillas(s: StateVector, a: int, outcome: str | int = 0) -> AncillaOutcome:
    """Project the top ``a`` wires onto a computational outcome.

    Returns the outcome probability and the renormalized signal state.
    """
    if not 0 <= a < s.width:
        raise ValueError(f"ancilla count {a} out of range for width {s.width}")
    if isinstance(outcome, str):
        outcome = int(outcome, 2) if outcome else 0
    if not 0 <= outcome < 2**a:
        raise ValueError(f"outcome {outcome} needs more than {a} ancilla bits")
    dim_signal = 2 ** (s.width - a)
    block = s.amplitudes[outcome * dim_signal : (outcome + 1) * dim_signal]
    probability = float(np.vdot(block, block).real)
    if probability <= 0.0:
        raise ZeroProbabilityError(f"outcome {outcome:0{a}b} has zero probability")
    post = block / np.sqrt(probability)
    return AncillaOutcome(probability, StateVector(s.width - a, post.copy()))


class ZeroProbabilityError(ValueError):
    pass


def extract_block(c: Circuit, a: int) -> np.ndarray:
    """Top-left block <0^a| U |0^a> of the circuit unitary, on the signal space."""
    if not 0 <= a <= c.width:
        raise ValueError(f"ancilla count {a} out of range")
    s = c.width - a
    dim = 2**s
    block = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        amps = np.zeros(2**c.width, dtype=complex)
        amps[j] = 1.0  # ancillas |0^a>, signal |j>
        apply_inplace(c, amps)
        block[:, j] = amps[:dim]
    return block


def unitary_matrix(c: Circuit) -> np.ndarray:
    """Full dense unitary; intended for tests at small width."""
    if c.width > 12:
        raise ValueError("unitary_matrix supports at most 12 qubits")
    dim = 2**c.width
    u = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[j] = 1.0
        apply_inplace(c, amps)
        u[:, j] = amps
    return u


def dump_csv(s: StateVector, path: str) -> None:
    with open(path, "w") as f:
        f.write("index,real,imag\n")
        for i, amp in enumerate(s.amplitudes):
            f.write(f"{i},{float(amp.real)!r},{float(amp.imag)!r}\n")
