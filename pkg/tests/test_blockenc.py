import numpy as np
import pytest

from springq.blockenc import (
    BlockEncoding,
    StatePrepPair,
    encoded_state_prep,
    identity_encoding,
    lcu,
    negated,
    product,
    real_state_prep,
    tensor,
    uniform_pair,
    verify,
    weighted_pair,
)
from springq.circuit import Circuit
from springq.engine import apply, unitary_matrix, zero_state
from springq.incidence import be_uniform_closed, be_uniform_open, l_shift_circuit, l_shift_matrix

X = np.array([[0.0, 1.0], [1.0, 0.0]])


def x_encoding() -> BlockEncoding:
    return BlockEncoding(Circuit(1).x(0), 1.0, 0)


def test_verify_trivial():
    assert verify(x_encoding(), X) == 0.0


def test_verify_uniform_closed():
    be = be_uniform_closed(4)
    target = np.eye(4) - l_shift_matrix(4)
    assert verify(be, target) <= 1e-10


def test_verify_wrong_alpha_gives_half_norm():
    be = be_uniform_closed(4)
    target = np.eye(4) - l_shift_matrix(4)
    wrong = BlockEncoding(be.circuit, 1.0, 1)
    # || B - B/2 ||_2 = ||B||_2 / 2 = 1 for the N=4 closed chain
    assert abs(verify(wrong, target) - 1.0) < 1e-10


def test_verify_dimension_mismatch():
    with pytest.raises(ValueError):
        verify(x_encoding(), np.eye(4))


def test_tensor_no_ancillas():
    t = tensor(x_encoding(), x_encoding())
    assert t.alpha == 1.0 and t.a == 0
    assert verify(t, np.kron(X, X)) < 1e-12


def test_tensor_with_ancillas():
    b2 = be_uniform_closed(2)
    m2 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    t = tensor(b2, b2)
    assert t.alpha == 4.0 and t.a == 2
    assert verify(t, np.kron(m2, m2)) < 1e-10


def test_tensor_mixed_register_shapes():
    b2 = be_uniform_closed(2)
    b4o = be_uniform_open(4)
    m2 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    m4o = 2 * b4o.block().real
    assert verify(tensor(b2, b4o), np.kron(m2, m4o)) < 1e-10
    assert verify(tensor(b4o, b2), np.kron(m4o, m2)) < 1e-10


def test_tensor_epsilon_arithmetic():
    a = BlockEncoding(Circuit(1).x(0), 2.0, 0, 0.1)
    b = BlockEncoding(Circuit(1).x(0), 3.0, 0, 0.2)
    t = tensor(a, b)
    assert abs(t.epsilon - (2 * 0.2 + 3 * 0.1 + 0.1 * 0.2)) < 1e-15


def test_product_identity_is_neutral():
    be = be_uniform_closed(4)
    p = product(identity_encoding(2), be)
    target = np.eye(4) - l_shift_matrix(4)
    assert verify(p, target) < 1e-10
    assert p.alpha == be.alpha and p.a == be.a


def test_product_alpha_and_epsilon():
    a = BlockEncoding(Circuit(1).x(0), 2.0, 0, 0.1)
    b = BlockEncoding(Circuit(1).x(0), 3.0, 0, 0.2)
    p = product(a, b)
    assert p.alpha == 6.0
    assert abs(p.epsilon - (2 * 0.2 + 3 * 0.1)) < 1e-15


def test_product_signal_mismatch():
    with pytest.raises(ValueError):
        product(x_encoding(), be_uniform_closed(4))


def test_product_matrix():
    be = be_uniform_closed(4)
    m = np.eye(4) - l_shift_matrix(4)
    assert verify(product(be, be), m @ m) < 1e-10


def test_lcu_identity_average():
    comb = lcu([0.5, 0.5], [identity_encoding(2), identity_encoding(2)])
    assert abs(comb.alpha - 1.0) < 1e-15
    assert verify(comb, np.eye(4)) < 1e-12


def test_lcu_uniform_closed_decomposition():
    be_i = identity_encoding(2)
    be_l = BlockEncoding(l_shift_circuit(2), 1.0, 0)
    comb = lcu([1.0, -1.0], [be_i, be_l])
    assert comb.alpha == 2.0
    assert verify(comb, np.eye(4) - l_shift_matrix(4)) < 1e-12


def test_lcu_term_count_guard():
    encs = [identity_encoding(1)] * 3
    with pytest.raises(ValueError):
        lcu([1.0, 1.0, 1.0], encs, uniform_pair(1))


def test_lcu_weighted_three_terms():
    rng = np.random.default_rng(2)
    weights = [0.7, 0.2, 0.4]
    mats, encs = [], []
    for seed in range(3):
        c = Circuit(2)
        c.ry(0.3 + 0.4 * seed, 0)
        c.x(1, [(0, 1)])
        encs.append(BlockEncoding(c, 1.0, 0))
        mats.append(unitary_matrix(c))
    comb = lcu(weights, encs)
    target = sum(w * m for w, m in zip(weights, mats))
    assert verify(comb, target) < 1e-10


def test_composition_error_budget_property():
    # verify(output, composed target) <= epsilon_out + slack on exact inputs
    b2 = be_uniform_closed(2)
    m2 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    for out, target in [
        (tensor(b2, b2), np.kron(m2, m2)),
        (product(b2, b2), m2 @ m2),
        (lcu([1.0, 1.0], [b2, b2]), 2 * m2),
    ]:
        assert verify(out, target) <= out.epsilon + 1e-9


def test_tensor_product_associativity():
    b2 = be_uniform_closed(2)
    m2 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    left = tensor(tensor(b2, b2), b2)
    right = tensor(b2, tensor(b2, b2))
    target = np.kron(np.kron(m2, m2), m2)
    assert verify(left, target) < 1e-9
    assert verify(right, target) < 1e-9
    pl = product(product(b2, b2), b2)
    pr = product(b2, product(b2, b2))
    assert verify(pl, m2 @ m2 @ m2) < 1e-9
    assert verify(pr, m2 @ m2 @ m2) < 1e-9


def test_weighted_pair_satisfies_definition():
    weights = np.array([0.5, 0.3, 0.2])
    pair = weighted_pair(weights)
    amps_p = apply(pair.prep_left, zero_state(pair.b)).amplitudes
    amps_q = apply(pair.prep_right, zero_state(pair.b)).amplitudes
    recon = pair.beta * amps_p.conj() * amps_q
    assert np.sum(np.abs(recon[: len(weights)] - weights)) <= pair.epsilon + 1e-12


def test_real_state_prep_sign_patterns():
    rng = np.random.default_rng(4)
    for width in (1, 2, 3):
        for _ in range(5):
            vec = rng.normal(size=2**width)
            vec /= np.linalg.norm(vec)
            out = apply(real_state_prep(vec), zero_state(width))
            assert np.allclose(out.amplitudes, vec, atol=1e-12)


def test_encoded_state_prep_exact_with_phase():
    top = np.array([0.0, 0.25, -0.3, 0.1])
    bottom = np.array([0.5, 0.0, -0.2, 0.6])
    psi = np.concatenate([top, 1j * bottom]).astype(complex)
    psi /= np.linalg.norm(psi)
    out = apply(encoded_state_prep(psi), zero_state(3))
    assert np.max(np.abs(out.amplitudes - psi)) < 1e-12


def test_negated():
    be = x_encoding()
    assert verify(negated(be), -X) < 1e-12
