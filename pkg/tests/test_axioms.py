import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import seeds
from wradius._search import SearchConfig
from wradius.affiliated import shift_generator
from wradius.axioms import (CheckReport, LinearMap, NormOracle, cb_norm_estimate, check_oi,
                            check_oii, check_ow, check_wi, check_wii, check_wmin_functor,
                            o_oracle, random_map, w_max_oracle, w_min_oracle, w_oracle, w_t_oracle)
from wradius.opspace import full_matrix_space, random_space, realize, scalar_space
from wradius.radius import NormEstimate

C = scalar_space()


def frobenius_oracle():
    """Not an operator-space norm: the Frobenius norm adds over direct sums."""
    def fn(space, x):
        v = float(np.linalg.norm(realize(space, x)))
        return NormEstimate(v, v, v, "frobenius")
    return NormOracle("frobenius", fn)


def squared_oracle():
    """Not homogeneous: O(x)^2 breaks the compression bound for ||alpha|| > 1."""
    def fn(space, x):
        v = o_oracle()(space, x).value ** 2
        return NormEstimate(v, v, v, "O^2")
    return NormOracle("O^2", fn)


# --- campaigns on exact oracles ---------------------------------------------

@pytest.mark.parametrize("make", [w_oracle, o_oracle, w_min_oracle,
                                  lambda: w_t_oracle(shift_generator(3, 0.5))])
def test_exact_oracles_pass(make, rng):
    X = random_space(3, 2, rng)
    for space in (C, X):
        for rep in (check_wi(make(), space, trials=30, seed=1),
                    check_wii(make(), space, trials=30, seed=1)):
            assert rep.passed, rep.summary()
            assert rep.max_margin <= 1e-8


def test_o_axioms_and_off_corner(rng):
    X = random_space(2, 3, rng)
    for rep in (check_oi(X, 40, 2), check_oii(X, 40, 2), check_ow(X, 40, 2)):
        assert rep.passed, rep.summary()
        assert rep.trials == 40 and rep.seed == 2


def test_cauchy_inputs(rng):
    assert check_wi(w_oracle(), random_space(2, 2, rng), trials=20, dist="cauchy").passed


def test_report_fields_and_json():
    rep = check_wi(w_oracle(), C, trials=10, seed=5, tol=1e-9)
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["check"] == "WI[w]" and obj["trials"] == 10 and obj["seed"] == 5
    assert obj["tolerance"] == 1e-9 and obj["violations"] == []
    assert "PASS" in rep.summary()
    assert check_oi(C, 5).check_name == "OI[O]"


def test_campaigns_are_reproducible(rng):
    X = random_space(2, 2, rng)
    a = check_wii(w_oracle(), X, trials=15, seed=3).to_json()
    b = check_wii(w_oracle(), X, trials=15, seed=3).to_json()
    assert a == b
    assert check_wii(w_oracle(), X, trials=15, seed=4).to_json() != a


def test_w_max_bracket_oracle():
    oracle = w_max_oracle(SearchConfig(restarts=2, iters=150))
    assert not oracle.exact
    assert check_wi(oracle, C, trials=6, max_level=2).passed
    assert check_wii(oracle, C, trials=6, max_level=2).passed


# --- violations --------------------------------------------------------------

def test_violations_are_found_and_shrunk():
    rep = check_wi(frobenius_oracle(), C, trials=20, seed=0)
    assert not rep.passed and "FAIL" in rep.summary()
    v = rep.violations[0]
    assert v.margin > rep.tolerance and v.lhs > v.rhs
    assert "shrunk by factor" in v.description
    # 20 bisection steps shrink a homogeneous defect by a factor of about 2^-20
    assert v.margin <= 1e-5 * rep.max_margin
    assert json.loads(json.dumps(rep.to_json()))["violations"][0]["input"] == v.description


def test_wrong_oracles_fail_other_axioms():
    assert not check_wii(squared_oracle(), C, trials=20).passed
    assert not check_ow(C, trials=20, oracle=o_oracle()).passed


# --- cb norms ----------------------------------------------------------------

def test_cb_estimate_monotone_in_level_and_samples(rng):
    phi = random_map(random_space(2, 2, rng), random_space(3, 2, rng), rng)
    est = cb_norm_estimate(phi, "W", max_level=3, samples=40, seed=1)
    rows = est.witness
    assert [r.level for r in rows] == [1, 2, 3]
    assert all(b.cumulative >= a.cumulative for a, b in zip(rows, rows[1:]))
    assert est.value == rows[-1].cumulative and not est.upper_certified
    fewer = cb_norm_estimate(phi, "W", max_level=3, samples=20, seed=1)
    assert fewer.value <= est.value
    ascent = cb_norm_estimate(phi, "W", max_level=2, samples=20, seed=1, ascent_iters=50)
    assert ascent.value >= cb_norm_estimate(phi, "W", max_level=2, samples=20, seed=1).value


@pytest.mark.parametrize("kind", ["W", "O", "W_min"])
def test_identity_map_has_cb_norm_one(kind, rng):
    X = random_space(2, 2, rng)
    ident = LinearMap(X, np.eye(2), X)
    v = cb_norm_estimate(ident, kind, max_level=2, samples=20).value
    assert v == pytest.approx(1.0, abs=1e-8)


@given(seeds(), st.floats(0.1, 10))
@settings(max_examples=10)
def test_cb_estimate_scales(seed, lam):
    rng = np.random.default_rng(seed)
    X = random_space(2, 2, rng)
    phi = random_map(X, X, rng)
    a = cb_norm_estimate(phi, "O", max_level=2, samples=15, seed=seed).value
    b = cb_norm_estimate(LinearMap(X, lam * phi.images, X), "O", max_level=2, samples=15,
                         seed=seed).value
    assert b == pytest.approx(lam * a, rel=1e-9)


def test_redundancy_flag_for_full_matrix_target(rng):
    phi = random_map(random_space(3, 2, rng), full_matrix_space(2), rng)
    est = cb_norm_estimate(phi, "W", max_level=3, samples=10)
    assert [r.redundant for r in est.witness] == [False, False, True]
    assert "redundant" in est.certificate
    phi = random_map(random_space(3, 2, rng), random_space(2, 2, rng), rng)
    assert not any(r.redundant for r in cb_norm_estimate(phi, "W", 3, 10).witness)


def test_cb_argument_validation(rng):
    phi = random_map(C, C, rng)
    for kwargs in ({"max_level": 0}, {"norm_kind": "X"}, {"samples": 0}):
        with pytest.raises(ValueError):
            cb_norm_estimate(phi, **kwargs)


def test_wmin_functor_identity(rng):
    phi = random_map(random_space(3, 2, rng), random_space(2, 3, rng), rng)
    rep = check_wmin_functor(phi, max_level=2, samples=30)
    assert isinstance(rep, CheckReport) and rep.passed
    assert rep.max_discrepancy <= 1e-12
