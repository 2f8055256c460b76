"""Block encodings and their composition rules (tensor, product, LCU).

A block encoding holds a circuit whose top-left block (on the all-zero
ancilla subspace, ancillas on the top wires) equals a target matrix divided
by the sub-normalization constant alpha.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, controlled_gates, dagger, embed, wire_permutation_gates
from .engine import extract_block


@dataclass(frozen=True)
class BlockEncoding:
    """(alpha, a, epsilon)-block-encoding of a 2^s x 2^s operator."""

    circuit: Circuit
    alpha: float
    a: int
    epsilon: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.epsilon < 0:
            raise ValueError("alpha and epsilon must be nonnegative")
        if not 0 <= self.a <= self.circuit.width:
            raise ValueError(f"ancilla count {self.a} out of range")

    @property
    def s(self) -> int:
        return self.circuit.width - self.a

    def block(self) -> np.ndarray:
        return extract_block(self.circuit, self.a)


def verify(be: BlockEncoding, target: np.ndarray) -> float:
    """Spectral-norm deviation ||target - alpha * block||_2 (dense SVD)."""
    target = np.asarray(target, dtype=complex)
    dim = 2**be.s
    if target.shape != (dim, dim):
        raise ValueError(f"target shape {target.shape} != {(dim, dim)}")
    diff = target - be.alpha * be.block()
    fro = float(np.linalg.norm(diff))  # cheap upper bound on the 2-norm
    if fro == 0.0:
        return 0.0
    return float(np.linalg.norm(diff, 2))


def identity_encoding(s: int) -> BlockEncoding:
    """Trivial (1, 0, 0)-encoding of the identity: an empty circuit."""
    return BlockEncoding(Circuit(s, label="I"), alpha=1.0, a=0)


def negated(be: BlockEncoding) -> BlockEncoding:
    """Encoding of -A: append a global -1 via Ry(2pi) on the first wire."""
    c = Circuit(be.circuit.width, list(be.circuit.gates), label=f"-({be.circuit.label})")
    c.ry(2 * np.pi, 0)
    return BlockEncoding(c, be.alpha, be.a, be.epsilon)


def tensor(beA: BlockEncoding, beB: BlockEncoding) -> BlockEncoding:
    """Encoding of A (x) B by juxtaposition plus a register-aligning swap net.

    Output wire layout: [ancillas of A][ancillas of B][signal of A][signal of B].
    """
    aA, aB, sA, sB = beA.a, beB.a, beA.s, beB.s
    width = aA + aB + sA + sB
    # Interleaved layout where U_A (x) U_B acts on contiguous registers.
    mid_to_out = (
        list(range(aA))
        + list(range(aA + aB, aA + aB + sA))
        + list(range(aA, aA + aB))
        + list(range(aA + aB + sA, width))
    )
    swap_net = wire_permutation_gates(mid_to_out)
    c = Circuit(width, label=f"({beA.circuit.label})x({beB.circuit.label})")
    c.extend([g.inverse() for g in reversed(swap_net)])
    c.extend(embed(beA.circuit, width, list(range(aA + sA))))
    c.extend(embed(beB.circuit, width, list(range(aA + sA, width))))
    c.extend(swap_net)
    eps = beA.alpha * beB.epsilon + beB.alpha * beA.epsilon + beA.epsilon * beB.epsilon
    return BlockEncoding(c, beA.alpha * beB.alpha, aA + aB, eps)


def product(beA: BlockEncoding, beB: BlockEncoding) -> BlockEncoding:
    """Encoding of A @ B with the two ancilla registers kept disjoint.

    Output wire layout: [ancillas of A][ancillas of B][shared signal].
    """
    if beA.s != beB.s:
        raise ValueError(f"signal width mismatch: {beA.s} != {beB.s}")
    aA, aB, s = beA.a, beB.a, beA.s
    width = aA + aB + s
    signal = list(range(aA + aB, width))
    c = Circuit(width, label=f"({beA.circuit.label})({beB.circuit.label})")
    c.extend(embed(beB.circuit, width, list(range(aA, aA + aB)) + signal))
    c.extend(embed(beA.circuit, width, list(range(aA)) + signal))
    return BlockEncoding(
        c, beA.alpha * beB.alpha, aA + aB, beA.alpha * beB.epsilon + beB.alpha * beA.epsilon
    )


@dataclass(frozen=True)
class StatePrepPair:
    """(beta, b, epsilon)-state-preparation pair (P_b, Q_b) for LCU weights."""

    prep_left: Circuit
    prep_right: Circuit
    beta: float
    b: int
    epsilon: float = 0.0


def uniform_pair(b: int = 1) -> StatePrepPair:
    """Equal-weight preparation: P_b = Q_b = H on every prep wire."""
    c = Circuit(b, label="Hprep")
    for q in range(b):
        c.h(q)
    return StatePrepPair(c, Circuit(b, list(c.gates), label="Hprep"), beta=float(2**b), b=b)


def weighted_pair(weights: np.ndarray) -> StatePrepPair:
    """Ry-tree preparation of sqrt(w_j / sum w) amplitudes; exact."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    beta = float(weights.sum())
    b = max(1, int(np.ceil(np.log2(len(weights)))))
    amps = np.zeros(2**b)
    amps[: len(weights)] = np.sqrt(weights / beta)
    c = real_state_prep(amps)
    return StatePrepPair(c, Circuit(b, list(c.gates), label=c.label), beta=beta, b=b)


def real_state_prep(amplitudes: np.ndarray) -> Circuit:
    """Circuit mapping |0...0> to a real unit vector, exactly (binary Ry tree).

    Signs are carried by the leaf-level rotations, so any sign pattern is
    reachable without extra phase gates.
    """
    amps = np.asarray(amplitudes, dtype=float)
    width = int(np.log2(len(amps)))
    if 2**width != len(amps):
        raise ValueError("amplitude count must be a power of two")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
        raise ValueError("amplitudes must be normalized")
    c = Circuit(width, label="prep")
    for level in range(width):
        block = 2 ** (width - level)  # amplitudes per branch node at this level
        half = block // 2
        for node in range(2**level):
            seg = amps[node * block : (node + 1) * block]
            if level < width - 1:
                left = float(np.linalg.norm(seg[:half]))
                right = float(np.linalg.norm(seg[half:]))
            else:
                left, right = float(seg[0]), float(seg[1])
            if left == 0.0 and right == 0.0:
                continue
            theta = 2.0 * np.arctan2(right, left)
            controls = tuple(
                (q, (node >> (level - 1 - q)) & 1) for q in range(level)
            )
            c.ry(theta, level, controls)
    return c


def lcu(
    coeffs: list[float],
    encodings: list[BlockEncoding],
    prep: StatePrepPair | None = None,
) -> BlockEncoding:
    """Encoding of sum_j gamma_j A_j via prepare / select / unprepare.

    Negative coefficients are absorbed into the selected branch as a global
    -1 (an appended Ry(2pi)).  Output layout:
    [b prep wires][max_j a_j inner ancillas][signal].
    """
    if len(coeffs) != len(encodings):
        raise ValueError("one coefficient per encoding")
    s = encodings[0].s
    if any(be.s != s for be in encodings):
        raise ValueError("all encodings must share the signal width")
    signed = [(abs(g), be if g >= 0 else negated(be)) for g, be in zip(coeffs, encodings)]
    if prep is None:
        if len(signed) == 2 and abs(signed[0][0] - signed[1][0]) < 1e-15:
            prep = uniform_pair(1)
        else:
            prep = weighted_pair(np.array([g for g, _ in signed]))
    b = prep.b
    if 2**b < len(encodings):
        raise ValueError(f"2^{b} prep states cannot select {len(encodings)} terms")
    a_inner = max(be.a for _, be in signed)
    width = b + a_inner + s
    c = Circuit(width, label="lcu")
    c.extend(embed(prep.prep_right, width, list(range(b))))
    for j, (_, be) in enumerate(signed):
        wires = list(range(b, b + be.a)) + list(range(b + a_inner, width))
        sub = embed(be.circuit, width, wires)
        bits = tuple((q, (j >> (b - 1 - q)) & 1) for q in range(b))
        c.extend(controlled_gates(sub.gates, bits))
    c.extend(dagger(embed(prep.prep_left, width, list(range(b)))))
    alpha = float(sum(g * be.alpha for g, be in signed))
    eps = float(sum(g * be.epsilon for g, be in signed)) + prep.epsilon
    return BlockEncoding(c, alpha, b + a_inner, eps)


def encoded_state_prep(psi: np.ndarray) -> Circuit:
    """Exact preparation circuit for states of the form (real ; i * real).

    The top half of ``psi`` must be real and the bottom half purely
    imaginary (the oscillator encoding).  A real Ry tree prepares
    (top ; Im bottom) and an exact S = H V H on the leading qubit restores
    the i factor, leaving no global-phase residue.
    """
    psi = np.asarray(psi, dtype=complex)
    width = int(np.log2(len(psi)))
    half = len(psi) // 2
    if np.max(np.abs(psi[:half].imag)) > 1e-12 or np.max(np.abs(psi[half:].real)) > 1e-12:
        raise ValueError("expected (real ; imaginary) amplitude layout")
    real_vec = np.concatenate([psi[:half].real, psi[half:].imag])
    c = real_state_prep(real_vec)
    c.h(0)
    c.v(0)
    c.h(0)  # H V H = diag(1, i): multiplies the bottom half by i
    return c
