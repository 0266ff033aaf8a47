import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import complex_matrix, seeds
from wradius.errors import FormatError, NoConvergence, NotHermitian, ShapeMismatch
from wradius.linalg import (as_matrix, assemble_block, block_diag, dagger, hermitian_eigenvalues,
                            jacobi_eigenvalues, kron, matrix_from_json, matrix_to_json,
                            operator_norm, random_unitary, symmetrize)


def hermitian(n, seed):
    A = complex_matrix(n, seed)
    return 0.5 * (A + A.conj().T)


# --- dagger ----------------------------------------------------------------

def test_dagger_examples():
    assert np.array_equal(dagger(np.eye(3)), np.eye(3))
    assert np.array_equal(dagger([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    assert dagger([[1j]])[0, 0] == -1j


@given(st.integers(1, 5), seeds())
def test_dagger_involution(n, seed):
    A = complex_matrix(n, seed)
    assert np.array_equal(dagger(dagger(A)), A)


# --- eigenvalues -----------------------------------------------------------

@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_eigenvalue_examples(method):
    assert np.allclose(hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]), method=method).eigenvalues,
                       [1, 2, 3])
    assert np.allclose(hermitian_eigenvalues([[0, 1], [1, 0]], method=method).eigenvalues, [-1, 1])


def test_eigenvalues_of_2x2_match_characteristic_roots():
    # roots of l^2 - l - 4 for [[2, 1-i], [1+i, -1]]
    ev = jacobi_eigenvalues([[2, 1 - 1j], [1 + 1j, -1]]).eigenvalues
    assert ev == pytest.approx([-1.5615528128088302749, 2.5615528128088302749], abs=1e-13)


@given(st.integers(1, 8), seeds())
def test_jacobi_trace_order_and_residual(n, seed):
    H = hermitian(n, seed)
    res = jacobi_eigenvalues(H)
    assert len(res.eigenvalues) == n
    assert np.all(np.diff(res.eigenvalues) >= 0)
    assert abs(res.eigenvalues.sum() - np.trace(H).real) <= 1e-10 * n
    assert res.residual <= 1e-13


@given(st.integers(1, 8), seeds())
def test_jacobi_agrees_with_lapack(n, seed):
    H = hermitian(n, seed)
    assert np.allclose(jacobi_eigenvalues(H).eigenvalues, np.linalg.eigvalsh(H), atol=1e-11)


def test_jacobi_sweep_budget():
    with pytest.raises(NoConvergence):
        jacobi_eigenvalues(hermitian(6, 1), max_sweeps=1)


def test_not_hermitian_rejected_and_roundoff_absorbed():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues([[0, 1], [0, 0]])
    H = hermitian(4, 2)
    H[0, 1] += 1e-15
    assert np.array_equal(symmetrize(H), symmetrize(H).conj().T)


def test_unknown_method():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.eye(2), method="qr")


# --- operator norm ---------------------------------------------------------

def test_operator_norm_examples(rng):
    assert operator_norm(random_unitary(4, rng)) == pytest.approx(1.0, abs=1e-13)
    assert operator_norm([[1, 1], [0, 1]]) == pytest.approx(1.6180339887498948482, abs=1e-13)
    assert operator_norm(np.zeros((3, 3))) == 0.0


@given(st.integers(1, 7), seeds())
def test_operator_norm_of_hermitian_is_spectral_radius(n, seed):
    H = hermitian(n, seed)
    ev = np.linalg.eigvalsh(H)
    assert abs(operator_norm(H) - max(abs(ev[0]), abs(ev[-1]))) <= 1e-10


@given(st.integers(1, 7), st.integers(1, 7), seeds())
def test_operator_norm_adjoint_and_rectangular(p, q, seed):
    A = np.random.default_rng(seed).normal(size=(p, q)) + 0j
    assert abs(operator_norm(A) - operator_norm(A.conj().T)) <= 1e-12 * max(1.0, operator_norm(A))
    assert operator_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-12)


# --- kron and blocks -------------------------------------------------------

def test_kron_examples(rng):
    B = complex_matrix(3, 4)
    assert np.array_equal(kron(np.eye(2), B), block_diag(B, B))
    assert np.array_equal(kron([[2]], B), 2 * B)


@given(st.integers(1, 6), st.integers(1, 6), seeds())
def test_kron_norm_multiplicative(m, n, seed):
    A, B = complex_matrix(m, seed), complex_matrix(n, seed + 1)
    assert abs(operator_norm(kron(A, B)) - operator_norm(A) * operator_norm(B)) <= 1e-9


def test_assemble_block_examples():
    A = complex_matrix(2, 5)
    Z = np.zeros((2, 2))
    assert np.array_equal(assemble_block([[A]]), A)
    corner = assemble_block([[Z, A], [Z, Z]])
    assert np.array_equal(corner[:2, 2:], A) and not np.any(corner[2:, :])
    B = complex_matrix(2, 6)
    D = assemble_block([[A, Z], [Z, B]])
    assert operator_norm(D) == pytest.approx(max(operator_norm(A), operator_norm(B)), abs=1e-12)


def test_assemble_block_rejects_inhomogeneous():
    with pytest.raises(ShapeMismatch):
        assemble_block([[np.eye(2), np.eye(3)], [np.eye(2), np.eye(2)]])
    with pytest.raises(ShapeMismatch):
        assemble_block([[np.eye(2)], [np.eye(2)]])


# --- validation and JSON ---------------------------------------------------

def test_as_matrix_validation():
    with pytest.raises(ValueError):
        as_matrix([[math.nan]])
    with pytest.raises(ShapeMismatch):
        as_matrix(np.zeros((2, 2, 2)))


@given(st.integers(1, 4), st.integers(1, 4), seeds())
def test_matrix_json_round_trip(p, q, seed):
    A = np.random.default_rng(seed).normal(size=(p, q)) + 1j
    assert np.array_equal(matrix_from_json(matrix_to_json(A)), A)


@pytest.mark.parametrize("obj,field", [
    ({"rows": 2, "cols": 2, "data": [[0, 0]] * 3}, "matrix.data"),
    ({"rows": 0, "cols": 2, "data": []}, "matrix.rows"),
    ({"rows": 1, "cols": 1, "data": [[1, 2, 3]]}, "matrix.data[0]"),
    ({"cols": 1, "data": [[1, 0]]}, "matrix.rows"),
])
def test_matrix_json_errors_name_the_field(obj, field):
    with pytest.raises(FormatError) as err:
        matrix_from_json(obj)
    assert err.value.field == field
