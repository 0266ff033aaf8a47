"""Hypothesis strategies for complex matrices and space elements."""
import numpy as np
from hypothesis import strategies as st

from wradius.linalg import random_complex


def seeds():
    return st.integers(min_value=0, max_value=2**31 - 1)


def complex_matrix(n, seed, scale=1.0):
    return scale * random_complex((n, n), np.random.default_rng(seed))


@st.composite
def square_matrices(draw, max_dim=6):
    n = draw(st.integers(1, max_dim))
    scale = draw(st.sampled_from([1e-3, 1.0, 10.0]))
    return complex_matrix(n, draw(seeds()), scale)
