import numpy as np
import pytest

from sharedclust.model import Network, VectorDataset


def assert_within_se(observed, expected, sd, n, factor=4.0, floor=0.0):
    """Assert an empirical mean lies within ``factor`` standard errors."""
    se = sd / np.sqrt(n)
    tol = max(factor * se, floor)
    assert abs(observed - expected) <= tol, (
        f"expected {expected} +- {tol}, got {observed}")


@pytest.fixture
def tiny_fixture():
    """Six objects, two clear clusters in one dimension, mostly-assortative edges."""
    x = np.array([-1.0, -1.2, -0.8, 1.0, 1.3, 0.9]).reshape(-1, 1)
    adj = np.zeros((6, 6), dtype=int)
    for i, j in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]:
        adj[i, j] = adj[j, i] = 1
    return VectorDataset(x), Network(adj)
