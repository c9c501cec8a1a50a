import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from qpebench.circuit import Circuit, unitary_of
from qpebench.synthesis import (
    SynthesisError,
    UnitaryMatrix,
    controlled_block,
    num_cx_required,
    synth_1q,
    synth_2q,
    synth_3q,
    synthesize,
    weyl_coordinates,
)

from .conftest import haar_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
seeds = st.integers(0, 2**32 - 1)


def cx_count(c: Circuit) -> int:
    return sum(g.kind == "CX" for g in c.gates)


def err(c: Circuit, u) -> float:
    return float(np.abs(unitary_of(c) - u).max())


def test_unitary_matrix_validation():
    with pytest.raises(SynthesisError):
        UnitaryMatrix.of(np.ones((2, 2)))
    with pytest.raises(SynthesisError):
        UnitaryMatrix.of(np.eye(3))
    with pytest.raises(SynthesisError):
        UnitaryMatrix.of(np.eye(2)[:, :1])
    u = UnitaryMatrix.of(np.eye(4))
    assert u.dim == 4 and u.n_qubits == 2 and u.unitarity_defect == 0.0


@pytest.mark.parametrize("fn", [synth_1q, synth_2q, synth_3q])
def test_non_unitary_rejected(fn):
    dim = {synth_1q: 2, synth_2q: 4, synth_3q: 8}[fn]
    with pytest.raises(SynthesisError):
        fn(2 * np.eye(dim))


def test_synthesize_dispatch_rejects_dimension():
    with pytest.raises(SynthesisError):
        synthesize(np.eye(16))


# ------------------------------------------------------------ one qubit


def test_1q_identity_is_empty():
    c = synth_1q(np.eye(2))
    assert c.gates == () and c.global_phase == 0.0


def test_1q_native_rz():
    rz = np.diag([np.exp(-0.35j), np.exp(0.35j)])
    c = synth_1q(rz)
    assert len(c) == 1 and c.gates[0].kind == "RZ"
    assert c.gates[0].angle == pytest.approx(0.7, abs=1e-15)
    assert err(c, rz) <= 1e-15


@given(seeds)
def test_1q_round_trip(seed):
    u = haar_unitary(np.random.default_rng(seed), 2)
    c = synth_1q(u)
    assert len(c) <= 3 and cx_count(c) == 0
    assert err(c, u) <= 1e-9


@pytest.mark.parametrize("u", [X, np.diag([1, 1j]), np.array([[0, 1j], [1j, 0]]), -np.eye(2)])
def test_1q_special_matrices(u):
    assert err(synth_1q(u), u) <= 1e-12


# ------------------------------------------------------------ two qubits


def test_2q_identity():
    c = synth_2q(np.eye(4))
    assert cx_count(c) == 0 and err(c, np.eye(4)) <= 1e-12


def test_2q_cx_weyl_point():
    a, b, c = weyl_coordinates(CX)
    assert (a, b, c) == pytest.approx((math.pi / 4, 0, 0), abs=1e-12)
    circ = synth_2q(CX)
    assert cx_count(circ) == 1 and err(circ, CX) <= 1e-9


def test_2q_local_product_needs_no_cx(rng):
    u = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    c = synth_2q(u)
    assert cx_count(c) == 0 and err(c, u) <= 1e-9


def test_2q_two_cx_class(rng):
    # exp(i (a XX + b YY)) has c = 0
    xx = np.kron(X, X)
    yy = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
    u = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2)) @ expm(1j * (0.3 * xx + 0.2 * yy))
    assert num_cx_required(weyl_coordinates(u)) == 2
    c = synth_2q(u)
    assert cx_count(c) == 2 and err(c, u) <= 1e-9


@given(seeds)
def test_2q_round_trip(seed):
    u = haar_unitary(np.random.default_rng(seed), 4)
    c = synth_2q(u)
    assert cx_count(c) <= 3
    assert err(c, u) <= 1e-9


def test_2q_generic_uses_three_cx(rng):
    assert cx_count(synth_2q(haar_unitary(rng, 4))) == 3


@given(seeds)
def test_weyl_coordinates_in_chamber(seed):
    a, b, c = weyl_coordinates(haar_unitary(np.random.default_rng(seed), 4))
    tol = 1e-12
    assert math.pi / 4 + tol >= a >= b - tol and b >= abs(c) - tol


@given(seeds)
def test_weyl_coordinates_local_invariance(seed):
    rng = np.random.default_rng(seed)
    u = haar_unitary(rng, 4)
    k1 = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    k2 = np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2))
    np.testing.assert_allclose(weyl_coordinates(k1 @ u @ k2), weyl_coordinates(u), atol=1e-8)


@given(seeds)
def test_controlled_1q_block(seed):
    u = haar_unitary(np.random.default_rng(seed), 2)
    block = controlled_block(u).matrix
    c = synth_2q(block)
    assert cx_count(c) <= 3 and err(c, block) <= 1e-9


# ------------------------------------------------------------ three qubits


def test_3q_identity():
    c = synth_3q(np.eye(8))
    assert cx_count(c) == 0 and err(c, np.eye(8)) <= 1e-12


def test_3q_tensor_product(rng):
    u = np.kron(np.kron(haar_unitary(rng, 2), haar_unitary(rng, 2)), haar_unitary(rng, 2))
    c = synth_3q(u)
    assert cx_count(c) <= 20 and err(c, u) <= 1e-8


@given(seeds)
def test_3q_round_trip(seed):
    u = haar_unitary(np.random.default_rng(seed), 8)
    c = synth_3q(u)
    assert cx_count(c) <= 20
    assert err(c, u) <= 1e-8


def test_3q_degenerate_inputs():
    toffoli = np.eye(8, dtype=complex)
    toffoli[6:, 6:] = X
    perm = np.eye(8)[[3, 0, 7, 5, 1, 6, 2, 4]].astype(complex)
    diag = np.diag(np.exp(1j * np.arange(8) * 0.37))
    for u in (toffoli, perm, diag, -np.eye(8)):
        c = synth_3q(u)
        assert cx_count(c) <= 20 and err(c, u) <= 1e-8


@given(seeds)
def test_controlled_2q_block(seed):
    u = haar_unitary(np.random.default_rng(seed), 4)
    block = controlled_block(u).matrix
    c = synth_3q(block)
    assert cx_count(c) <= 20 and err(c, block) <= 1e-8


# ------------------------------------------------------------ controlled blocks and determinism


def test_controlled_block_examples(rng):
    np.testing.assert_array_equal(controlled_block(X).matrix, CX)
    np.testing.assert_array_equal(controlled_block(np.eye(2)).matrix, np.eye(4))
    u = haar_unitary(rng, 4)
    m = controlled_block(u).matrix
    np.testing.assert_array_equal(m[:4, :4], np.eye(4))
    np.testing.assert_array_equal(m[4:, 4:], u)
    np.testing.assert_array_equal(m[:4, 4:], 0)
    with pytest.raises(SynthesisError):
        controlled_block(np.eye(8))


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_deterministic(dim, rng):
    u = haar_unitary(rng, dim)
    a, b = synthesize(u), synthesize(u.copy())
    assert a == b
