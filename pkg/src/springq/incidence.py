"""Block-encoding circuits for incidence-type matrices of spring chains.

Covers the cyclic L-shift, the uniform closed/open chain matrices
B-bar = I - L and I' - L', multiplexed-Ry diagonal encodings, the padded
constructions for N != 2^n (the Xi_g / M_c / M_o permutation gadgets), and
the composed encoding of B = sqrt(M)^-1 Phi sqrt(W) for general systems.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding, product
from .circuit import CLOSED, OPEN, Circuit, Gate, controlled_gates, embed
from .oscillator import CLOSED_CHAIN, OscillatorSystem, build_matrices


def l_shift_gates(wires: list[int]) -> list[Gate]:
    """Cyclic increment |j> -> |j+1 mod 2^n> on the given wires (wire 0 = MSB).

    A descending chain of multi-controlled NOTs: each wire flips when all
    lower wires are 1; the bottom wire flips unconditionally.
    """
    n = len(wires)
    gates = []
    for j in range(n):
        controls = tuple((wires[i], CLOSED) for i in range(j + 1, n))
        gates.append(Gate("X", (wires[j],), controls))
    return gates


def l_shift_circuit(n: int) -> Circuit:
    if n < 1:
        raise ValueError("need at least one qubit")
    c = Circuit(n, label=f"L_{2**n}")
    c.extend(l_shift_gates(list(range(n))))
    return c


def l_shift_matrix(dim: int) -> np.ndarray:
    mat = np.zeros((dim, dim))
    for j in range(dim):
        mat[(j + 1) % dim, j] = 1.0
    return mat


def be_uniform_closed(n_osc: int) -> BlockEncoding:
    """(2, 1, 0)-encoding of B-bar_c(N) = I - L via (XH (x) I)(C-L)(H (x) I)."""
    n = _log2_exact(n_osc)
    c = Circuit(1 + n, label=f"Bc_{n_osc}")
    c.h(0)
    c.extend(controlled_gates(l_shift_gates(list(range(1, 1 + n))), [(0, CLOSED)]))
    c.h(0)
    c.x(0)
    return BlockEncoding(c, alpha=2.0, a=1)


def be_uniform_open(n_osc: int) -> BlockEncoding:
    """(2, 2, 0)-encoding of B-bar_o(N) = I' - L' (last column zeroed)."""
    n = _log2_exact(n_osc)
    c = Circuit(2 + n, label=f"Bo_{n_osc}")
    c.h(0)
    # I': flip the inner ancilla out of |0> exactly on index 11...1.
    i_prime = [Gate("X", (1,), tuple((q, CLOSED) for q in range(2, 2 + n)))]
    c.extend(controlled_gates(i_prime, [(0, OPEN)]))
    # L': the L-shift on the doubled space walks index N-1 out of the block.
    c.extend(controlled_gates(l_shift_gates(list(range(1, 2 + n))), [(0, CLOSED)]))
    c.h(0)
    c.x(0)
    return BlockEncoding(c, alpha=2.0, a=2)


def be_diagonal(values: np.ndarray) -> BlockEncoding:
    """(1, 1, 0)-encoding of diag(d) by bitstring-controlled Ry(2 arccos d_i)."""
    values = np.asarray(values, dtype=float)
    if np.any(np.abs(values) > 1.0 + 1e-12):
        raise ValueError("diagonal entries must lie in [-1, 1]; rescale the system")
    n = _log2_exact(len(values))
    c = Circuit(1 + n, label="diag")
    for i, d in enumerate(values):
        theta = 2.0 * np.arccos(np.clip(d, -1.0, 1.0))
        if theta == 0.0:
            continue
        controls = tuple((1 + q, (i >> (n - 1 - q)) & 1) for q in range(n))
        c.ry(theta, 0, controls)
    return BlockEncoding(c, alpha=1.0, a=1)


@dataclass(frozen=True)
class PaddedShape:
    """Embedding of N oscillators into the 2^n_tilde padded index space."""

    n_osc: int
    g: int

    def __post_init__(self):
        if self.g not in (0, 1):
            raise ValueError("shift parameter g must be 0 or 1")

    @property
    def n_tilde(self) -> int:
        return max(1, int(np.ceil(np.log2(self.n_osc))))

    @property
    def n_padded(self) -> int:
        return 2**self.n_tilde


def xi_gate(shape: PaddedShape) -> Circuit:
    """Xi_g: flip the ancilla (wire 0) exactly when the index register >= N - g.

    Built as the greedy binary interval cover of [N - g, 2^n_tilde); each
    fired iteration contributes one multi-controlled NOT with the
    accumulated open controls.
    """
    nt = shape.n_tilde
    c = Circuit(1 + nt, label=f"Xi_{shape.g}")
    h = shape.n_padded
    not_ctrl: list[int] = []
    for i in range(1, nt + 1):
        if h - 2 ** (nt - i) >= shape.n_osc - shape.g:
            controls = tuple(
                (q, OPEN if q in not_ctrl else CLOSED) for q in range(1, i + 1)
            )
            c.add(Gate("X", (0,), controls))
            not_ctrl.append(i)
            h -= 2 ** (nt - i)
    return c


PADDED_KINDS = ("I", "Iprime", "L", "Lprime")


def be_padded(kind: str, shape: PaddedShape) -> BlockEncoding:
    """(1, 1, 0)-encoding of the zero-padded I, I', L or L' of the chain.

    L: Xi_1, then M_c (CNOT toggles per the binary form of 2^n_tilde + N - 1,
    then the doubled-space L-shift).  L': Xi_1 then M_o = I (x) L on the
    index register alone.
    """
    if kind not in PADDED_KINDS:
        raise ValueError(f"kind must be one of {PADDED_KINDS}")
    g = 0 if kind == "I" else 1
    shape = PaddedShape(shape.n_osc, g)
    nt = shape.n_tilde
    c = Circuit(1 + nt, label=f"pad_{kind}_{shape.n_osc}")
    c.extend(xi_gate(shape))
    if kind == "L":
        pattern = shape.n_padded + shape.n_osc - g
        for q in range(1, nt + 1):
            if not (pattern >> (nt - q)) & 1:
                c.x(q, controls=[(0, CLOSED)])
        c.extend(l_shift_gates(list(range(0, nt + 1))))
    elif kind == "Lprime":
        c.extend(l_shift_gates(list(range(1, nt + 1))))
    return BlockEncoding(c, alpha=1.0, a=1)


def padded_target(kind: str, shape: PaddedShape) -> np.ndarray:
    """Dense zero-padded targets for the four partial encodings."""
    n, dim = shape.n_osc, shape.n_padded
    mat = np.zeros((dim, dim))
    if kind in ("I", "Iprime"):
        last = n if kind == "I" else n - 1
        mat[:last, :last] = np.eye(last)
    else:
        inner = l_shift_matrix(n)
        if kind == "Lprime":
            inner = inner.copy()
            inner[:, n - 1] = 0.0
        mat[:n, :n] = inner
    return mat


def be_phi(n_osc: int, boundary: int) -> BlockEncoding:
    """(2, 2, 0)-encoding of the (padded) incidence matrix Phi = I - L variant.

    LCU of the two padded partial encodings with shared inner ancilla; the
    trailing X on the prepare wire realizes the minus sign.
    """
    shape = PaddedShape(n_osc, 1)
    nt = shape.n_tilde
    ident = be_padded("I" if boundary == CLOSED_CHAIN else "Iprime", shape)
    shift = be_padded("L" if boundary == CLOSED_CHAIN else "Lprime", shape)
    c = Circuit(2 + nt, label=f"Phi_{'c' if boundary else 'o'}_{n_osc}")
    inner = list(range(1, 2 + nt))
    c.h(0)
    c.extend(controlled_gates(embed(ident.circuit, c.width, inner).gates, [(0, OPEN)]))
    c.extend(controlled_gates(embed(shift.circuit, c.width, inner).gates, [(0, CLOSED)]))
    c.h(0)
    c.x(0)
    return BlockEncoding(c, alpha=2.0, a=2)


def be_general_B(sys: OscillatorSystem) -> BlockEncoding:
    """Encoding of B = sqrt(M)^-1 Phi sqrt(W) as a product of three encodings.

    Diagonal factors are (1,1,0)-encodings (padding: unit masses, zero
    springs); the incidence factor is the (2, a_phi, 0) chain encoding, so
    alpha = 2 and the ancilla count is a_phi + 2.
    """
    dim = sys.n_padded
    inv_sqrt_m = np.ones(dim)
    inv_sqrt_m[: sys.n] = 1.0 / np.sqrt(sys.masses)
    sqrt_w = np.zeros(dim)
    sqrt_w[: sys.n] = np.sqrt(sys.springs)
    be_m = be_diagonal(inv_sqrt_m)
    be_w = be_diagonal(sqrt_w)
    if sys.n == dim:
        phi = (
            be_uniform_closed(sys.n)
            if sys.boundary == CLOSED_CHAIN
            else be_uniform_open(sys.n)
        )
    else:
        phi = be_phi(sys.n, sys.boundary)
    return product(be_m, product(phi, be_w))


def be_system_B(sys: OscillatorSystem) -> BlockEncoding:
    """Route: uniform systems use the bare chain encodings, otherwise compose."""
    if sys.is_uniform() and sys.n == sys.n_padded:
        if sys.boundary == CLOSED_CHAIN:
            return be_uniform_closed(sys.n)
        return be_uniform_open(sys.n)
    return be_general_B(sys)


def padded_B(sys: OscillatorSystem) -> np.ndarray:
    mats = build_matrices(sys)
    return mats.padded("B")


def _log2_exact(n: int) -> int:
    bits = int(np.log2(n))
    if 2**bits != n or n < 2:
        raise ValueError(f"{n} is not a power of two >= 2 (use the padded route)")
    return bits
