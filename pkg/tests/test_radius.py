import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from strategies import complex_matrix, seeds, square_matrices
from wradius.errors import ShapeMismatch
from wradius.linalg import operator_norm, random_unitary
from wradius.radius import (NormEstimate, amplified_w, graded_potential, numerical_radius,
                            numerical_radius_fast, radius_lower_bound_sampling,
                            rotated_real_part, zero_estimate)

# 2x2 references from the elliptical range (foci at the eigenvalues), maximized
# in 40-digit arithmetic independently of this package
ELLIPSE_CASES = [
    ([[1, 2], [0, 1j]], 1.7071067811865475244),
    ([[0, math.sqrt(0.5)], [0, math.sqrt(0.5)]], 0.8535533905932737622),
    ([[0.3 - 0.2j, 1.1 + 0.4j], [-0.5 + 0.7j, 0.2 + 0.9j]], 1.5453644791688064531),
]


def jordan(n):
    return np.diag(np.ones(n - 1), 1).astype(np.complex128)


# --- rotated real part -----------------------------------------------------

def test_rotated_real_part_examples():
    H = complex_matrix(3, 1)
    H = H + H.conj().T
    assert np.allclose(rotated_real_part(H, 0.0), H)
    assert np.allclose(rotated_real_part([[0, 1], [0, 0]], 0.0), [[0, 0.5], [0.5, 0]])


@given(st.integers(1, 5), seeds(), st.floats(-10, 10))
def test_rotated_real_part_is_hermitian(n, seed, theta):
    H = rotated_real_part(complex_matrix(n, seed), theta)
    assert np.array_equal(H, H.conj().T)


# --- numerical radius: examples ---------------------------------------------

@pytest.mark.parametrize("grading", [True, False])
def test_nilpotent_2x2(grading):
    est = numerical_radius([[0, 1], [0, 0]], use_grading=grading)
    assert abs(est.lower - 0.5) <= 1e-8 and abs(est.upper - 0.5) <= 1e-8


@pytest.mark.parametrize("grading", [True, False])
@pytest.mark.parametrize("n", range(2, 9))
def test_jordan_blocks(n, grading):
    est = numerical_radius(jordan(n), use_grading=grading)
    c = math.cos(math.pi / (n + 1))
    assert est.lower - 1e-8 <= c <= est.upper + 1e-8
    assert est.upper - est.lower <= 1e-8


def test_hermitian_radius_is_norm():
    H = complex_matrix(4, 3)
    H = H + H.conj().T
    assert numerical_radius(H).value == pytest.approx(operator_norm(H), abs=1e-9)


@pytest.mark.parametrize("A,ref", ELLIPSE_CASES)
def test_matches_ellipse_oracle(A, ref):
    est = numerical_radius(A)
    assert est.lower - 1e-12 <= ref <= est.upper + 1e-12
    assert est.gap <= 1e-8


def test_degenerate_inputs():
    assert numerical_radius(np.zeros((3, 3))).value == 0.0
    assert numerical_radius([[3 - 4j]]).value == 5.0
    with pytest.raises(ShapeMismatch):
        numerical_radius(np.ones((2, 3)))
    with pytest.raises(ValueError):
        numerical_radius(np.eye(2), tol=0.0)


def test_graded_detection():
    assert graded_potential(jordan(4)) is not None
    assert graded_potential(complex_matrix(3, 0)) is None
    A = np.zeros((4, 4), complex)
    A[0, 1] = A[1, 2] = A[0, 3] = A[3, 2] = 1.0  # two paths of length 2 from 0 to 2
    assert graded_potential(A) is not None
    A[0, 2] = 1.0  # a path of length 1 conflicts
    assert graded_potential(A) is None


def test_point_budget_shortfall_is_reported():
    A = np.zeros((4, 4), complex)
    A[:2, 2:] = complex_matrix(2, 7)
    est = numerical_radius(A, 1e-12, max_points=256, use_grading=False)
    assert "not reached" in est.certificate
    half = 0.5 * operator_norm(A[:2, 2:])
    assert est.lower <= half + 1e-12 <= est.upper + 2e-12


# --- numerical radius: properties ------------------------------------------

@given(square_matrices(max_dim=7))
def test_bracket_width_and_norm_bounds(A):
    est = numerical_radius(A)
    nA = operator_norm(A)
    assert est.lower <= est.value <= est.upper
    assert est.upper - est.lower <= 1e-8 * max(1.0, nA) + 1e-12
    assert 0.5 * nA <= est.upper + 1e-9 * max(1.0, nA)
    assert est.lower <= nA + 1e-9 * max(1.0, nA)


@given(st.integers(1, 6), seeds())
def test_adjoint_and_unitary_invariance(n, seed):
    A = complex_matrix(n, seed)
    U = random_unitary(n, np.random.default_rng(seed + 1))
    w = numerical_radius(A)
    for B in (A.conj().T, U @ A @ U.conj().T):
        v = numerical_radius(B)
        assert abs(v.value - w.value) <= 1e-8


@given(st.integers(1, 5), st.integers(1, 5), seeds())
def test_concrete_compression_inequality(m, n, seed):
    rng = np.random.default_rng(seed)
    A = complex_matrix(m, seed)
    alpha = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    lhs = numerical_radius(alpha @ A @ alpha.conj().T).value
    assert lhs <= operator_norm(alpha) ** 2 * numerical_radius(A).value + 1e-9 * (1 + lhs)


@given(st.integers(1, 6), seeds(), st.integers(0, 1000))
def test_sampling_oracle_is_below_upper(n, seed, sseed):
    A = complex_matrix(n, seed)
    low = radius_lower_bound_sampling(A, samples=10, seed=sseed, steps=50)
    assert low <= numerical_radius(A).upper + 1e-12


def test_sampling_oracle_examples():
    assert radius_lower_bound_sampling(np.eye(3), samples=5) == pytest.approx(1.0, abs=1e-12)
    assert radius_lower_bound_sampling([[0, 1], [0, 0]], samples=20) == pytest.approx(0.5, abs=1e-6)
    A = complex_matrix(4, 9)
    assert radius_lower_bound_sampling(A, seed=3) == radius_lower_bound_sampling(A, seed=3)


@given(st.integers(2, 6), seeds())
@example(n=2, seed=315231)  # two near-equal peaks of the support function
def test_fast_radius_agrees_with_certified(n, seed):
    A = complex_matrix(n, seed)
    est = numerical_radius(A)
    fast = numerical_radius_fast(A)
    assert fast <= est.upper + 1e-12
    assert fast >= est.lower - 1e-6


# --- amplifications and the estimate type -----------------------------------

def test_amplified_examples():
    A, B = complex_matrix(2, 11), complex_matrix(2, 12)
    Z = np.zeros((2, 2))
    assert amplified_w([[A, Z], [Z, B]]).value == pytest.approx(
        max(numerical_radius(A).value, numerical_radius(B).value), abs=1e-8)
    assert amplified_w([[Z, A], [Z, Z]]).value == pytest.approx(0.5 * operator_norm(A), abs=1e-8)
    assert amplified_w([[A]]).value == numerical_radius(A).value


def test_norm_estimate_invariants():
    with pytest.raises(ValueError):
        NormEstimate(1.0, 2.0, 3.0, "")
    with pytest.raises(ValueError):
        NormEstimate(1.0, 0.5, math.inf, "")
    e = NormEstimate(1.0, 1.0, math.inf, "sup", upper_certified=False)
    assert e.to_json()["upper"] is None
    assert e.scaled(-2).lower == 2.0
    assert zero_estimate().gap == 0.0
