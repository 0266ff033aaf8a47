import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import seeds
from wradius._search import SearchConfig
from wradius import affiliated
from wradius.affiliated import (balance, shift_generator, trivial_factorization,
                                two_by_two_generator, w_max, w_min, w_t_norm)
from wradius.errors import DomainError, SearchFailure
from wradius.linalg import operator_norm, random_complex
from wradius.opspace import (MatrixOverX, o_norm, random_element, random_space, realize,
                             scalar_compress, scalar_element, scalar_space, w_norm, zero_element)
from wradius.radius import numerical_radius

FAST = SearchConfig(restarts=4, iters=300)
C = scalar_space()
NIL = scalar_element([[0, 1], [0, 0]])


# --- W_min -----------------------------------------------------------------

def test_w_min_examples(rng):
    assert w_min(C, NIL).value == pytest.approx(0.5)
    assert w_min(C, zero_element(2, 1)).value == 0.0
    X = random_space(3, 2, rng)
    x = random_element(X, 2, rng)
    assert w_min(X, x).lower <= w_norm(X, x).upper


# --- W_max -----------------------------------------------------------------

def test_w_max_nilpotent_scalar():
    est = w_max(C, NIL, FAST)
    assert est.lower <= 0.5 <= est.upper and est.upper - 0.5 <= 1e-6


def level_one_oracle(o):
    """Brute force of inf 1/2 (s^2 + t^2) O(x) / (s t) over a grid of s, t > 0."""
    s = np.exp(np.linspace(-3, 3, 601))
    S, T = np.meshgrid(s, s)
    return float(np.min(0.5 * (S ** 2 + T ** 2) * o / (S * T)))


def test_level_one_collapse(rng):
    X = random_space(3, 2, rng)
    for _ in range(3):
        x = MatrixOverX(random_complex((1, 1, 2), rng))
        o = o_norm(X, x).value
        est = w_max(X, x, FAST)
        assert level_one_oracle(o) == pytest.approx(o, rel=1e-12)
        assert abs(est.upper - o) <= 1e-6


def test_hermitian_scalar_element(rng):
    a = random_complex((3, 3), rng)
    a = a + a.conj().T
    est = w_max(C, scalar_element(a), FAST)
    assert abs(est.upper - operator_norm(a)) <= 1e-3
    assert est.lower <= operator_norm(a) + 1e-9


def test_zero_element():
    est = w_max(C, zero_element(2, 1))
    assert est.value == est.upper == 0.0


@settings(max_examples=6)
@given(seeds())
def test_w_max_sandwich_and_witness(seed):
    rng = np.random.default_rng(seed)
    X = random_space(2, 2, rng)
    x = random_element(X, 2, rng)
    est = w_max(X, x, FAST)
    o = o_norm(X, x)
    wm = w_min(X, x)
    assert est.lower <= est.upper
    assert wm.value <= est.upper + 1e-9
    assert est.upper <= o.upper + 1e-9
    assert est.upper <= 2 * wm.upper + 1e-6
    assert w_norm(X, x).lower <= est.upper
    f = est.witness
    rec = realize(X, scalar_compress(f.a, f.y, f.b))
    R = realize(X, x)
    assert np.linalg.norm(rec - R) / np.linalg.norm(R) <= 1e-8
    assert abs(operator_norm(realize(X, f.y)) - 1.0) <= 1e-8
    P = f.a @ f.a.conj().T + f.b.conj().T @ f.b
    assert 0.5 * operator_norm(P) <= est.upper * (1 + 1e-12)


def test_w_max_is_deterministic(rng):
    X = random_space(2, 2, rng)
    x = random_element(X, 2, rng)
    assert w_max(X, x, FAST) == w_max(X, x, FAST)


def test_trivial_factorization(rng):
    X = random_space(2, 2, rng)
    x = random_element(X, 2, rng)
    f = trivial_factorization(X, x)
    assert f.objective == pytest.approx(o_norm(X, x).value)
    assert np.allclose(realize(X, scalar_compress(f.a, f.y, f.b)), realize(X, x))


def test_balance_minimizes_scaled_sum(rng):
    a, b = random_complex((2, 2), rng), 3 * random_complex((2, 2), rng)
    a2, b2 = balance(a, b)

    def val(p, q):
        return operator_norm(p @ p.conj().T + q.conj().T @ q)

    assert val(a2, b2) <= val(a, b) + 1e-12
    assert np.allclose(a2 @ b2, a @ b)


def test_failed_search_falls_back_or_raises(monkeypatch, rng):
    monkeypatch.setattr(affiliated, "_witness", lambda *args: None)
    X = random_space(2, 2, rng)
    x = random_element(X, 2, rng)
    est = w_max(X, x, SearchConfig(restarts=1, iters=20))
    assert est.upper == pytest.approx(o_norm(X, x).upper)
    assert "trivial fallback" in est.certificate
    with pytest.raises(SearchFailure):
        w_max(X, x, SearchConfig(restarts=1, iters=20), strict=True)


# --- generators ------------------------------------------------------------

@given(st.integers(2, 7), st.floats(0, 1))
def test_shift_generator_norm_and_nilpotency(n, t):
    g = shift_generator(n, t)
    assert operator_norm(g.matrix) == pytest.approx(1.0, abs=1e-12)
    assert not np.any(np.linalg.matrix_power(g.matrix, n))


def test_shift_generator_examples():
    g = shift_generator(3, 1.0)
    assert np.array_equal(g.matrix, np.diag([1.0, 1.0], 1))
    assert numerical_radius(g.matrix).value == pytest.approx(math.cos(math.pi / 4), abs=1e-8)
    assert numerical_radius(shift_generator(3, 0.0).matrix).value == pytest.approx(0.5, abs=1e-8)
    assert np.array_equal(shift_generator(2, 0.3).matrix, [[0, 1], [0, 0]])
    for bad in ((3, -0.1), (3, 1.5), (1, 0.5)):
        with pytest.raises(DomainError):
            shift_generator(*bad)


def test_two_by_two_generator():
    assert numerical_radius(two_by_two_generator(0.0)).value == pytest.approx(0.5, abs=1e-8)
    assert numerical_radius(two_by_two_generator(1.0)).value == pytest.approx(1.0, abs=1e-8)
    # elliptical-range oracle: center sqrt(2)/4, semi-major 1/2
    assert numerical_radius(two_by_two_generator(0.5)).value == pytest.approx(
        0.8535533905932737622, abs=1e-8)
    for t in (0.0, 0.3, 1.0):
        assert operator_norm(two_by_two_generator(t)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        two_by_two_generator(2.0)


# --- W_t -------------------------------------------------------------------

def test_w_t_examples(rng):
    X = random_space(2, 2, rng)
    x = random_element(X, 2, rng)
    assert w_t_norm(X, x, shift_generator(3, 0.0)).value == pytest.approx(w_min(X, x).value, abs=1e-8)
    assert w_t_norm(X, x, [[1.0]]).value == pytest.approx(w_norm(X, x).value, abs=1e-12)
    a = random_complex((2, 2), rng)
    w1 = w_t_norm(C, scalar_element(a), shift_generator(3, 1.0)).value
    assert w1 >= math.cos(math.pi / 4) * numerical_radius(a).value - 1e-8
    with pytest.raises(DomainError):
        w_t_norm(X, x, 1.1 * np.eye(2))


@given(seeds(), st.floats(0, 1), st.floats(0, 1))
def test_w_t_bracketed_and_lipschitz(seed, t, s):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    a = random_complex((n, n), rng)
    x = scalar_element(a)
    wt = w_t_norm(C, x, shift_generator(3, t))
    ws = w_t_norm(C, x, shift_generator(3, s))
    o = o_norm(C, x).value
    assert w_min(C, x).value - 1e-8 <= wt.value <= numerical_radius(a).value + 1e-8
    assert abs(wt.value - ws.value) <= o * abs(t - s) + 1e-9
