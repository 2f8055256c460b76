"""Block encodings of H = -(|0><1| (x) B + |1><0| (x) B^dag) and its shift.

The doubling qubit is the most-significant signal wire, so the dense block
matrix layout matches [[0, -B], [-B^dag, 0]].  The shifted operator
H-hat = (H / alpha_H + I) / 2 has spectrum inside [0, 1] (in fact within
[1/4, 3/4], since ||B|| <= alpha_B = alpha_H / 2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding, tensor
from .circuit import CLOSED, OPEN, Circuit, controlled_gates, dagger, embed
from .engine import extract_block


def _be_ket0_bra1() -> BlockEncoding:
    """(1, 1, 0)-encoding of |0><1|: a SWAP then X on the ancilla."""
    c = Circuit(2, label="01")
    c.swap(0, 1)
    c.x(0)
    return BlockEncoding(c, alpha=1.0, a=1)


@dataclass(frozen=True)
class HamiltonianEncoding:
    be: BlockEncoding

    @property
    def alpha_h(self) -> float:
        return self.be.alpha

    @property
    def a_h(self) -> int:
        return self.be.a


@dataclass(frozen=True)
class ShiftedEncoding:
    be: BlockEncoding


def be_hamiltonian(beB: BlockEncoding) -> HamiltonianEncoding:
    """(2 alpha_B, a_B + 2, 0)-encoding of H.

    LCU of U^(01) (the tensor encoding of |0><1| (x) B) against its own
    dagger, closed by Ry(2pi) for the overall -1.
    """
    be01 = tensor(_be_ket0_bra1(), beB)  # (alpha_B, a_B + 1, 0) of |0><1| (x) B
    width = 1 + be01.circuit.width
    inner = list(range(1, width))
    c = Circuit(width, label="U_H")
    c.h(0)
    c.extend(controlled_gates(embed(dagger(be01.circuit), width, inner).gates, [(0, OPEN)]))
    c.extend(controlled_gates(embed(be01.circuit, width, inner).gates, [(0, CLOSED)]))
    c.h(0)
    c.ry(2 * np.pi, 0)
    return HamiltonianEncoding(BlockEncoding(c, 2 * beB.alpha, beB.a + 2, beB.epsilon))


def be_shifted(hH: HamiltonianEncoding) -> ShiftedEncoding:
    """(1, a_H + 1, 0)-encoding of (H / alpha_H + I) / 2 by LCU with identity."""
    width = 1 + hH.be.circuit.width
    c = Circuit(width, label="U_Hhat")
    c.h(0)
    c.extend(
        controlled_gates(
            embed(hH.be.circuit, width, list(range(1, width))).gates, [(0, CLOSED)]
        )
    )
    c.h(0)
    return ShiftedEncoding(BlockEncoding(c, 1.0, hH.be.a + 1, hH.be.epsilon))


def dense_hamiltonian(hH: HamiltonianEncoding) -> np.ndarray:
    return hH.alpha_h * extract_block(hH.be.circuit, hH.be.a)
