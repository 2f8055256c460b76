"""Block-encoded time evolution: the (4, a_H + 3, eps)-encoding of e^{-iHt}.

QSVT encodings of cos(H-hat tau)/2 and sin(H-hat tau)/2 (tau = 2 alpha_H t)
are recombined by a two-term LCU; an exact S-dagger = H V-dagger H on the
select wire injects the -i of the sine branch, and Rz(-tau) cancels the
global phase e^{-i tau / 2} left by the spectral shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockenc import BlockEncoding
from .circuit import CLOSED, OPEN, Circuit, controlled_gates, embed
from .engine import StateVector, apply, project_ancillas
from .hamiltonian import HamiltonianEncoding, be_shifted
from .oscillator import EncodedState
from .qsvt import DegreePlan, PhaseCache, PhaseSequence, plan_degree, qsvt_sequence, solve_phases

ALPHA_HS = 4.0


@dataclass(frozen=True)
class EvolutionEncoding:
    be: BlockEncoding
    t: float
    tau: float
    plan: DegreePlan
    cos_phases: PhaseSequence
    sin_phases: PhaseSequence
    cu_h_calls: int

    @property
    def epsilon(self) -> float:
        return self.be.epsilon


def solve_evolution_phases(
    plan: DegreePlan, epsilon: float, cache: PhaseCache | None = None
) -> tuple[PhaseSequence, PhaseSequence]:
    """Phases for the two branches; each gets half the error budget."""
    tau = plan.tau
    tol = epsilon / 2.0
    cache = cache or PhaseCache(None)
    cos_ps = cache.load("cos_half", tau, plan.cos_degree, tol)
    if cos_ps is None:
        cos_ps = solve_phases(
            lambda x: 0.5 * np.cos(tau * x),
            plan.cos_degree,
            "even",
            tol,
            target_name="cos_half",
            tau=tau,
        )
        cache.store(cos_ps, tol)
    sin_ps = cache.load("sin_half", tau, plan.sin_degree, tol)
    if sin_ps is None:
        sin_ps = solve_phases(
            lambda x: 0.5 * np.sin(tau * x),
            plan.sin_degree,
            "odd",
            tol,
            target_name="sin_half",
            tau=tau,
        )
        cache.store(sin_ps, tol)
    return cos_ps, sin_ps


def assemble_evolution(
    shifted_be: BlockEncoding,
    cos_ps: PhaseSequence,
    sin_ps: PhaseSequence,
    tau: float,
    label: str = "U_exp",
) -> BlockEncoding:
    """LCU of the two QSVT branches plus the -i dressing and phase removal."""
    qsvt_cos = qsvt_sequence(shifted_be, cos_ps, check_hermitian=False)
    qsvt_sin = qsvt_sequence(shifted_be, sin_ps, check_hermitian=False)
    width = 1 + qsvt_cos.circuit.width
    inner = list(range(1, width))
    c = Circuit(width, label=label)
    c.h(0)
    c.extend(controlled_gates(embed(qsvt_cos.circuit, width, inner).gates, [(0, OPEN)]))
    c.extend(controlled_gates(embed(qsvt_sin.circuit, width, inner).gates, [(0, CLOSED)]))
    # S-dagger = H V-dagger H = diag(1, -i): the sine branch picks up -i.
    c.h(0)
    c.vdg(0)
    c.h(0)
    c.h(0)
    c.rz(-tau, 0)
    return BlockEncoding(
        c,
        alpha=ALPHA_HS,
        a=qsvt_cos.a + 1,
        epsilon=cos_ps.achieved_error + sin_ps.achieved_error,
    )


def be_exp(
    hH: HamiltonianEncoding,
    t: float,
    epsilon: float,
    cache: PhaseCache | None = None,
) -> EvolutionEncoding:
    """Assemble the (4, a_H + 3, eps)-encoding of e^{-iHt}."""
    plan = plan_degree(t, epsilon, hH.alpha_h)
    cos_ps, sin_ps = solve_evolution_phases(plan, epsilon, cache)
    shifted = be_shifted(hH)
    be = assemble_evolution(
        shifted.be, cos_ps, sin_ps, plan.tau, label=f"U_exp(t={t:.6g})"
    )
    return EvolutionEncoding(
        be=be,
        t=t,
        tau=plan.tau,
        plan=plan,
        cos_phases=cos_ps,
        sin_phases=sin_ps,
        cu_h_calls=cos_ps.degree + sin_ps.degree,
    )


def structural_phases(plan: DegreePlan) -> tuple[PhaseSequence, PhaseSequence]:
    """Placeholder (zero) phase sequences: gate structure without solving."""
    cos_ps = PhaseSequence(
        (0.0,) * (plan.cos_degree + 1),
        (0.0,) * (plan.cos_degree + 1),
        "even",
        plan.cos_degree,
        "cos_half",
        plan.tau,
        0.0,
    )
    sin_ps = PhaseSequence(
        (0.0,) * (plan.sin_degree + 1),
        (0.0,) * (plan.sin_degree + 1),
        "odd",
        plan.sin_degree,
        "sin_half",
        plan.tau,
        0.0,
    )
    return cos_ps, sin_ps


def evolve_state(ev: EvolutionEncoding, psi0: EncodedState) -> tuple[float, EncodedState]:
    """Apply the evolution encoding and project the ancillas on |0...0>.

    The ideal success probability is 1/alpha_HS^2 = 1/16 for a normalized
    input; the post-state approximates e^{-iHt} psi0.
    """
    a = ev.be.a
    amps = np.zeros(2**ev.be.circuit.width, dtype=complex)
    amps[: len(psi0.amplitudes)] = psi0.amplitudes  # ancillas |0^a>
    state = StateVector(ev.be.circuit.width, amps)
    out = apply(ev.be.circuit, state)
    outcome = project_ancillas(out, a, 0)
    evolved = EncodedState(
        amplitudes=outcome.post_state.amplitudes,
        norm=psi0.norm,
        n_physical=psi0.n_physical,
    )
    return outcome.probability, evolved
