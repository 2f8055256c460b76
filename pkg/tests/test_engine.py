import numpy as np
import pytest

from springq.circuit import Circuit
from springq.engine import (
    StateVector,
    ZeroProbabilityError,
    apply,
    backend_name,
    basis_state,
    dump_csv,
    extract_block,
    from_amplitudes,
    project_ancillas,
    unitary_matrix,
    zero_state,
    _compile,
)
from springq import _kernels_py
from springq.incidence import be_uniform_closed, l_shift_circuit, l_shift_matrix

from oracles import random_circuit


def test_apply_hadamard():
    out = apply(Circuit(1).h(0), zero_state(1))
    assert np.allclose(out.amplitudes, np.array([1, 1]) / np.sqrt(2))


def test_apply_l_shift_all_basis_states():
    for n in (1, 2, 3, 4):
        c = l_shift_circuit(n)
        for j in range(2**n):
            out = apply(c, basis_state(n, j))
            expected = np.zeros(2**n)
            expected[(j + 1) % 2**n] = 1.0
            assert np.allclose(out.amplitudes, expected)


def test_apply_matches_dense_oracle():
    rng = np.random.default_rng(17)
    for _ in range(5):
        c = random_circuit(4, 20, rng)
        u = unitary_matrix(c)
        amps = rng.normal(size=16) + 1j * rng.normal(size=16)
        amps /= np.linalg.norm(amps)
        out = apply(c, from_amplitudes(amps))
        assert np.allclose(out.amplitudes, u @ amps, atol=1e-12)


def test_apply_width_mismatch():
    with pytest.raises(ValueError):
        apply(Circuit(2).x(0), zero_state(3))


def test_apply_preserves_norm():
    from springq.engine import UNITARITY_TOL

    rng = np.random.default_rng(23)
    c = random_circuit(6, 60, rng)
    amps = rng.normal(size=64) + 1j * rng.normal(size=64)
    amps /= np.linalg.norm(amps)
    out = apply(c, from_amplitudes(amps))
    assert abs(out.norm() - 1.0) < UNITARITY_TOL


def test_apply_is_linear():
    rng = np.random.default_rng(29)
    c = random_circuit(3, 15, rng)
    s = rng.normal(size=8) + 1j * rng.normal(size=8)
    t = rng.normal(size=8) + 1j * rng.normal(size=8)
    a, b = 0.3 - 0.2j, 1.1 + 0.4j
    lhs = apply(c, from_amplitudes(a * s + b * t)).amplitudes
    rhs = a * apply(c, from_amplitudes(s)).amplitudes + b * apply(c, from_amplitudes(t)).amplitudes
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_project_equal_superposition():
    v = np.array([1, 0, 0, 0], dtype=complex)
    w = np.array([0, 0, 1, 0], dtype=complex)
    amps = np.concatenate([v, w]) / np.sqrt(2)
    outcome = project_ancillas(from_amplitudes(amps), 1, 0)
    assert abs(outcome.probability - 0.5) < 1e-14
    assert np.allclose(outcome.post_state.amplitudes, v)


def test_project_zero_probability():
    amps = np.zeros(4, dtype=complex)
    amps[0] = 1.0
    with pytest.raises(ZeroProbabilityError):
        project_ancillas(from_amplitudes(amps), 1, 1)


def test_project_block_encoding_action():
    be = be_uniform_closed(4)
    x = np.array([0.5, -0.3, 0.7, 0.1])
    x = x / np.linalg.norm(x)
    amps = np.zeros(8, dtype=complex)
    amps[:4] = x
    out = apply(be.circuit, from_amplitudes(amps))
    outcome = project_ancillas(out, 1, 0)
    target = (np.eye(4) - l_shift_matrix(4)) @ x / 2
    expected = target / np.linalg.norm(target)
    assert np.allclose(outcome.post_state.amplitudes, expected, atol=1e-12)
    assert abs(outcome.probability - np.linalg.norm(target) ** 2) < 1e-12


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(31)
    c = random_circuit(5, 25, rng)
    out = apply(c, zero_state(5))
    total = sum(
        project_ancillas(out, 2, k).probability
        for k in range(4)
        if np.linalg.norm(out.amplitudes[k * 8 : (k + 1) * 8]) > 0
    )
    assert abs(total - 1.0) < 1e-12


def test_extract_block_identity():
    assert np.allclose(extract_block(Circuit(3), 1), np.eye(4))


def test_extract_block_uniform_closed():
    from springq.engine import BLOCK_TOL

    blk = extract_block(be_uniform_closed(4).circuit, 1)
    assert np.allclose(2 * blk, np.eye(4) - l_shift_matrix(4), atol=BLOCK_TOL)


def test_extract_block_dagger_is_adjoint():
    from springq.circuit import dagger

    rng = np.random.default_rng(37)
    for _ in range(4):
        c = random_circuit(5, 25, rng)
        a = extract_block(dagger(c), 2)
        b = extract_block(c, 2).conj().T
        assert np.allclose(a, b, atol=1e-12)


def test_backend_parity_python_vs_selected():
    """Both kernels must produce identical amplitudes on the same ops."""
    rng = np.random.default_rng(41)
    c = random_circuit(6, 40, rng)
    py_ops, arrays = _compile(c)
    amps0 = rng.normal(size=64) + 1j * rng.normal(size=64)
    a1 = amps0.copy()
    _kernels_py.apply_ops(a1, 6, py_ops, arrays)
    a2 = amps0.copy()
    from springq.engine import _kernels

    _kernels.apply_ops(a2, 6, py_ops, arrays)
    assert np.allclose(a1, a2, atol=1e-13)


def test_backend_name_reports():
    assert backend_name() in ("cython", "python")


def test_dump_csv(tmp_path):
    path = tmp_path / "state.csv"
    dump_csv(from_amplitudes(np.array([1, 1j]) / np.sqrt(2)), str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "index,real,imag"
    assert len(lines) == 3
    idx, re, im = lines[2].split(",")
    assert idx == "1" and abs(float(im) - 1 / np.sqrt(2)) < 1e-15
