import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_row_stochastic(rng, c, floor=1e-3):
    """Random row-stochastic matrix with entries bounded away from zero."""
    m = rng.random((c, c)) + floor
    return m / m.sum(axis=1, keepdims=True)
