import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import seeds
from wradius._search import (SearchConfig, herm_from_params, herm_function, nelder_mead,
                             params_from_herm, restart_rng, traceless_expand, traceless_reduce)
from wradius.errors import FormatError


@given(st.integers(1, 5), seeds())
def test_hermitian_parameter_round_trip(n, seed):
    p = np.random.default_rng(seed).normal(size=n * n)
    H = herm_from_params(p, n)
    assert np.array_equal(H, H.conj().T)
    assert np.allclose(params_from_herm(H), p)
    # the map is an isometry from R^{n^2} to Hermitian matrices with the Frobenius norm
    assert np.linalg.norm(H) == pytest.approx(np.linalg.norm(p))


@given(st.integers(2, 5), seeds())
def test_traceless_round_trip(n, seed):
    p = np.random.default_rng(seed).normal(size=n * n)
    q = traceless_reduce(p, n)
    assert len(q) == n * n - 1
    e = traceless_expand(q, n)
    assert abs(e[:n].sum()) < 1e-12
    assert np.allclose(traceless_reduce(e, n), q)


def test_herm_function_clamps():
    H = np.diag([100.0, -100.0])
    assert np.allclose(np.diag(herm_function(H, lambda m: m)), [23.0, -23.0])


def test_nelder_mead_never_worse_than_start():
    def f(x):
        return float(np.sum((x - 1.0) ** 2))

    x, fx = nelder_mead(f, np.zeros(3), 400)
    assert fx < 1e-12 and np.allclose(x, 1.0, atol=1e-6)
    x, fx = nelder_mead(f, np.ones(2), 5)
    assert fx == 0.0
    x, fx = nelder_mead(lambda x: 3.0, np.zeros(0), 10)
    assert fx == 3.0


def test_config_validation_and_json():
    cfg = SearchConfig(restarts=3, iters=10, seed=2, tol=1e-6)
    assert SearchConfig.from_json(cfg.to_json()) == cfg
    for bad in ({"restarts": 0}, {"iters": 1.5}, {"seed": -1}, {"tol": 0}):
        with pytest.raises(FormatError):
            SearchConfig.from_json(bad)
    with pytest.raises(FormatError) as err:
        SearchConfig.from_json({"restart": 2})
    assert "unknown" in str(err.value)


def test_restart_streams_are_independent_of_order():
    a = restart_rng(4, 2).normal(size=3)
    restart_rng(4, 1).normal(size=3)
    assert np.array_equal(a, restart_rng(4, 2).normal(size=3))
