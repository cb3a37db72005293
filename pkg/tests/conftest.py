import numpy as np
import pytest

from cvcbic import NumericMatrix


def random_matrix(rng, n_max=10, m_max=6, v_max=4, miss_rate=0.0):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    A = rng.integers(0, v_max + 1, size=(n, m)).astype(float)
    miss = rng.random((n, m)) < miss_rate if miss_rate else None
    return NumericMatrix(A, miss)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
