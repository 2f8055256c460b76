import math

import numpy as np
import pytest

from springq.blockenc import BlockEncoding, verify
from springq.circuit import Circuit, Gate, embed
from springq.engine import unitary_matrix
from springq.hamiltonian import be_hamiltonian, be_shifted
from springq.incidence import be_diagonal, be_system_B
from springq.oscillator import OscillatorSystem, build_matrices
from springq.qsvt import (
    DegreePlan,
    PhaseCache,
    PhaseSolverError,
    bessel_j,
    chebyshev_targets,
    jacobi_anger_tail,
    phi_from_varphi,
    plan_degree,
    projector_phase,
    qsp_real_polynomial,
    qsvt_sequence,
    solve_phases,
    varphi_from_phi,
)

from oracles import chebyshev_t


def bessel_series(n: int, x: float, terms: int = 60) -> float:
    """Power-series oracle: J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!)."""
    total = 0.0
    for m in range(terms):
        term = (-1.0) ** m * (x / 2.0) ** (n + 2 * m)
        total += term / (math.factorial(m) * math.factorial(n + m))
    return total


def test_plan_degree_t0():
    plan = plan_degree(0.0, 0.01, 4.0)
    assert plan.tau == 0.0
    assert plan.k == 5
    assert plan.d_sin == 4 and plan.d_cos == 5


def test_plan_degree_tau4():
    plan = plan_degree(0.5, 0.01, 4.0)
    assert plan.tau == 4.0
    assert plan.k == 11
    assert plan.d_sin == 10 and plan.d_cos == 11


def test_plan_degree_parity_sum():
    for t, eps in [(0.0, 0.01), (0.5, 0.01), (1.7, 0.003), (3.2, 0.2)]:
        plan = plan_degree(t, eps, 4.0)
        assert plan.d_sin % 2 == 0 and plan.d_cos % 2 == 1
        assert plan.d_sin + plan.d_cos == 2 * plan.k - 1
        assert plan.cos_degree % 2 == 0 and plan.sin_degree % 2 == 1


def test_plan_degree_epsilon_guard():
    with pytest.raises(ValueError):
        plan_degree(1.0, 0.7, 4.0)


def test_bessel_against_series_oracle():
    assert abs(bessel_j(0, 1.0)[0] - 0.7651976866) < 1e-9
    for x in (0.5, 1.0, 4.0, 9.3):
        js = bessel_j(8, x)
        for n in range(9):
            assert abs(js[n] - bessel_series(n, x)) < 1e-12, (n, x)


def test_chebyshev_targets_tau0():
    plan = plan_degree(0.0, 0.01, 4.0)
    cos_c, sin_c = chebyshev_targets(plan)
    assert abs(cos_c[0] - 0.5) < 1e-15
    assert np.allclose(cos_c[1:], 0.0)
    assert np.allclose(sin_c, 0.0)


def test_chebyshev_reconstruction_tau4():
    plan = plan_degree(0.5, 0.01, 4.0)  # tau = 4
    cos_c, sin_c = chebyshev_targets(plan)
    xs = np.linspace(-1, 1, 401)
    cos_rec = sum(c * chebyshev_t(d, xs) for d, c in enumerate(cos_c))
    sin_rec = sum(c * chebyshev_t(d, xs) for d, c in enumerate(sin_c))
    assert np.max(np.abs(cos_rec - np.cos(4 * xs) / 2)) < 0.005
    assert np.max(np.abs(sin_rec - np.sin(4 * xs) / 2)) < 0.005


def test_jacobi_anger_tail_small_at_planned_degree():
    plan = plan_degree(0.5, 0.01, 4.0)
    assert jacobi_anger_tail(plan.tau, plan.cos_degree) < 0.005


def test_varphi_transform_and_bijection():
    phis = np.array([0.3, -0.1, 0.7, 0.2])
    v = varphi_from_phi(phis)
    assert abs(v[0] - (0.3 + np.pi / 4)) < 1e-15
    assert abs(v[1] - (-0.1 + np.pi / 2)) < 1e-15
    assert abs(v[-1] - (0.2 + np.pi / 4)) < 1e-15
    assert np.allclose(phi_from_varphi(v), phis, atol=1e-15)


def test_solve_phases_linear_target():
    ps = solve_phases(lambda x: x / 2, 1, "odd", 1e-9, target_name="T1/2")
    xs = np.linspace(-1, 1, 101)
    assert np.max(np.abs(qsp_real_polynomial(np.array(ps.phis), xs) - xs / 2)) < 1e-9


def test_solve_phases_constant_target():
    ps = solve_phases(lambda x: 0.5, 4, "even", 1e-9, target_name="cos_half", tau=0.0)
    assert ps.achieved_error < 1e-12


def test_solve_phases_tau4_budget():
    tau = 4.0
    cos_ps = solve_phases(lambda x: np.cos(tau * x) / 2, 10, "even", 5e-3, target_name="cos")
    sin_ps = solve_phases(lambda x: np.sin(tau * x) / 2, 11, "odd", 5e-3, target_name="sin")
    assert cos_ps.achieved_error < 1e-4
    assert sin_ps.achieved_error < 1e-4


def test_solve_phases_parity_guard():
    with pytest.raises(ValueError):
        solve_phases(lambda x: x, 2, "odd", 1e-3)


def test_solve_phases_failure_carries_best_error():
    # degree 2 cannot represent cos(6x)/2 to 1e-6
    with pytest.raises(PhaseSolverError) as err:
        solve_phases(lambda x: np.cos(6 * x) / 2, 2, "even", 1e-6)
    assert err.value.achieved > 1e-6


def test_projector_phase_matrix():
    phi = np.pi / 2
    u = unitary_matrix(projector_phase(1, phi))
    # scratch |0> sector realizes diag(e^{i phi}, e^{-i phi}) on the ancilla
    expected = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    assert np.allclose(u[:2, :2], expected, atol=1e-12)
    # scratch |1> sector carries the conjugate phases
    assert np.allclose(u[2:, 2:], expected.conj(), atol=1e-12)


def test_projector_phase_zero_is_identity():
    u = unitary_matrix(projector_phase(2, 0.0))
    assert np.allclose(u, np.eye(8), atol=1e-12)


def test_projector_phase_composition():
    a, b = 0.4, -1.1
    c = Circuit(3)
    c.extend(projector_phase(2, a))
    c.extend(projector_phase(2, b))
    assert np.allclose(
        unitary_matrix(c), unitary_matrix(projector_phase(2, a + b)), atol=1e-12
    )


def _diag_encoding():
    return be_diagonal(np.array([0.9, 0.3, -0.5, -0.95]))


@pytest.mark.parametrize("d,parity", [(1, "odd"), (2, "even"), (3, "odd"), (4, "even"), (5, "odd")])
def test_qsvt_chebyshev_ladder(d, parity):
    be = _diag_encoding()
    ps = solve_phases(lambda x: chebyshev_t(d, x) / 2, d, parity, 1e-9, target_name=f"T{d}/2")
    out = qsvt_sequence(be, ps)
    target = np.diag(chebyshev_t(d, np.array([0.9, 0.3, -0.5, -0.95])) / 2)
    assert verify(out, target) < 1e-9
    assert out.a == be.a + 1 and out.alpha == 1.0


def test_qsvt_identity_polynomial_on_shifted_hamiltonian():
    sys = OscillatorSystem(np.ones(2), np.ones(2), 1)
    h = be_hamiltonian(be_system_B(sys))
    sh = be_shifted(h)
    ps = solve_phases(lambda x: x / 2, 1, "odd", 1e-9, target_name="x/2")
    out = qsvt_sequence(sh.be, ps)
    hhat = (build_matrices(sys).hamiltonian() / h.alpha_h + np.eye(4)) / 2
    assert verify(out, hhat / 2) <= 1e-9


def test_qsvt_constant_cos_at_tau0():
    sys = OscillatorSystem(np.ones(2), np.ones(2), 1)
    sh = be_shifted(be_hamiltonian(be_system_B(sys)))
    ps = solve_phases(lambda x: 0.5, 4, "even", 1e-9, target_name="cos_half", tau=0.0)
    out = qsvt_sequence(sh.be, ps)
    assert verify(out, np.eye(4) / 2) <= 1e-9


def test_qsvt_cos_uniform_n4_tau4():
    sys = OscillatorSystem(np.ones(4), np.ones(4), 1)
    h = be_hamiltonian(be_system_B(sys))
    sh = be_shifted(h)
    tau = 4.0
    ps = solve_phases(
        lambda x: np.cos(tau * x) / 2, 10, "even", 5e-3, target_name="cos_half", tau=tau
    )
    out = qsvt_sequence(sh.be, ps)
    hhat = (build_matrices(sys).hamiltonian() / h.alpha_h + np.eye(8)) / 2
    evals, evecs = np.linalg.eigh(hhat)
    target = evecs @ np.diag(np.cos(tau * evals) / 2) @ evecs.conj().T
    assert np.linalg.norm(out.block() - target, 2) <= 1e-3


def test_qsvt_requires_hermitian_block():
    from springq.incidence import l_shift_circuit

    # the L-shift block is a non-symmetric permutation
    wide = BlockEncoding(Circuit(3).extend(embed(l_shift_circuit(2), 3, [1, 2])), 1.0, 1)
    ps = solve_phases(lambda x: x / 2, 1, "odd", 1e-9)
    with pytest.raises(ValueError):
        qsvt_sequence(wide, ps)


def test_qsvt_block_commutes_with_operator():
    sys = OscillatorSystem(np.ones(2), np.ones(2), 1)
    h = be_hamiltonian(be_system_B(sys))
    sh = be_shifted(h)
    tau = 2.0
    ps = solve_phases(
        lambda x: np.cos(tau * x) / 2, 8, "even", 1e-3, target_name="cos_half", tau=tau
    )
    blk = qsvt_sequence(sh.be, ps).block()
    hhat = sh.be.block()
    assert np.max(np.abs(blk @ hhat - hhat @ blk)) < 1e-8


def test_qsvt_parity_under_chiral_conjugation():
    """Even targets commute with the spectrum flip, odd targets change sign."""
    x_enc = BlockEncoding(Circuit(2).extend([Gate("X", (1,))]), 1.0, 1)
    z = np.diag([1.0, -1.0])
    even_ps = solve_phases(lambda x: chebyshev_t(2, x) / 2, 2, "even", 1e-9)
    odd_ps = solve_phases(lambda x: chebyshev_t(3, x) / 2, 3, "odd", 1e-9)
    blk_even = qsvt_sequence(x_enc, even_ps).block()
    blk_odd = qsvt_sequence(x_enc, odd_ps).block()
    assert np.allclose(z @ blk_even @ z, blk_even, atol=1e-9)
    assert np.allclose(z @ blk_odd @ z, -blk_odd, atol=1e-9)


def test_phase_cache_round_trip(tmp_path):
    cache = PhaseCache(str(tmp_path))
    ps = solve_phases(lambda x: 0.5, 4, "even", 1e-9, target_name="cos_half", tau=0.0)
    cache.store(ps, 1e-9)
    loaded = cache.load("cos_half", 0.0, 4, 1e-9)
    assert loaded is not None
    assert np.allclose(loaded.phis, ps.phis)
    assert loaded.parity == ps.parity
    assert loaded.achieved_error == ps.achieved_error
    assert cache.load("cos_half", 1.0, 4, 1e-9) is None
