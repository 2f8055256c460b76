"""Robust oblivious amplitude amplification: reflections, Grover W, schedule.

W = -U R_psi0 U^dag R_good rotates within the span of the good component
(ancillas all zero) and the orthogonal rest; Q_W iterations boost the
ancilla-|0^a> probability from (norm/alpha)^2 to sin^2((2 Q_W + 1) theta).
The -1 is realized exactly as Ry(2pi), so simulated post-states carry no
stray phase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, dagger, embed
from .engine import StateVector, apply_inplace, project_ancillas
from .evolution import EvolutionEncoding
from .oscillator import EncodedState

PROJECTION_FLOOR = 0.5


def reflection_zero(m: int) -> Circuit:
    """I - 2 |0^m><0^m| as an X-conjugated multi-controlled Z; phase-exact."""
    if m < 1:
        raise ValueError("need at least one wire")
    c = Circuit(m, label=f"R0({m})")
    for q in range(m):
        c.x(q)
    c.add(Gate("Z", (m - 1,), tuple((q, 1) for q in range(m - 1))))
    for q in range(m):
        c.x(q)
    return c


def grover_iteration(ev: EvolutionEncoding, prep: Circuit) -> Circuit:
    """W = -U R_psi0 U^dag R_good, with R_psi0 = (I (x) S) R_0 (I (x) S^dag)."""
    be = ev.be
    width = be.circuit.width
    a = be.a
    n_sig = width - a
    if prep.width != n_sig:
        raise ValueError(f"prep width {prep.width} != signal width {n_sig}")
    signal = list(range(a, width))
    c = Circuit(width, label="grover_W")
    c.extend(embed(reflection_zero(a), width, list(range(a))))
    c.extend(dagger(be.circuit))
    c.extend(embed(dagger(prep), width, signal))
    c.extend(reflection_zero(width))
    c.extend(embed(prep, width, signal))
    c.extend(be.circuit)
    c.ry(2 * np.pi, 0)  # the leading -1, exact
    return c


@dataclass(frozen=True)
class RoaaSchedule:
    amplitude: float
    q_w: int
    predicted_success: float

    @property
    def q_aa(self) -> int:
        """Block-encoding queries including the leftmost application."""
        return 2 * self.q_w + 1


def schedule(alpha_hs: float, psi0_norm: float) -> RoaaSchedule:
    """Locally optimal iteration count for amplitude a = norm / alpha."""
    amplitude = psi0_norm / alpha_hs
    if not 0.0 < amplitude <= 1.0:
        raise ValueError(f"amplitude {amplitude} outside (0, 1]")
    theta = float(np.arcsin(amplitude))
    raw = np.pi / (4.0 * theta) - 0.5
    candidates = {0, max(0, int(np.floor(raw))), max(0, int(np.ceil(raw)))}
    best = max(sorted(candidates), key=lambda q: np.sin((2 * q + 1) * theta) ** 2)
    return RoaaSchedule(
        amplitude=amplitude,
        q_w=best,
        predicted_success=float(np.sin((2 * best + 1) * theta) ** 2),
    )


class ProjectionFloorError(RuntimeError):
    pass


@dataclass
class AmplifiedResult:
    probability: float
    pre_probability: float
    predicted: float
    post_state: EncodedState
    q_w: int


def amplify_and_measure(
    ev: EvolutionEncoding,
    prep: Circuit,
    sched: RoaaSchedule,
    psi0: EncodedState,
    *,
    floor: float = PROJECTION_FLOOR,
) -> AmplifiedResult:
    """Run U_ev then Q_W Grover iterations; project ancillas on |0...0>."""
    be = ev.be
    width = be.circuit.width
    a = be.a
    amps = np.zeros(2**width, dtype=complex)
    amps[0] = 1.0
    apply_inplace(embed(prep, width, list(range(a, width))), amps)
    apply_inplace(be.circuit, amps)
    dim_signal = 2 ** (width - a)
    pre_probability = float(np.vdot(amps[:dim_signal], amps[:dim_signal]).real)
    if sched.q_w > 0:
        w_circuit = grover_iteration(ev, prep)
        for _ in range(sched.q_w):
            apply_inplace(w_circuit, amps)
    outcome = project_ancillas(StateVector(width, amps), a, 0)
    if outcome.probability < floor:
        raise ProjectionFloorError(
            f"post-amplification success {outcome.probability:.4f} < floor {floor}; "
            f"adjust the ROAA schedule (q_w={sched.q_w})"
        )
    post = EncodedState(
        amplitudes=outcome.post_state.amplitudes,
        norm=psi0.norm,
        n_physical=psi0.n_physical,
    )
    return AmplifiedResult(
        probability=outcome.probability,
        pre_probability=pre_probability,
        predicted=sched.predicted_success,
        post_state=post,
        q_w=sched.q_w,
    )
