import math

import numpy as np
import pytest

from maghom import PointCloud, from_distance_matrix, from_point_cloud


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def two_point_unit():
    return from_distance_matrix([[0, 1], [1, 0]], backend="rational")


@pytest.fixture
def k3_unit():
    return from_distance_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]], backend="rational")


@pytest.fixture
def collinear_cloud():
    return PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))


@pytest.fixture
def collinear_space(collinear_cloud):
    return from_point_cloud(collinear_cloud, backend="rational")


def barcodes_close(b1, b2, tol=1e-9):
    """Multiset equality of bars up to tol on births/deaths/weights."""
    s1, s2 = b1.sorted_bars(), b2.sorted_bars()
    if len(s1) != len(s2):
        return False
    for x, y in zip(s1, s2):
        if x.dim != y.dim:
            return False
        if abs(float(x.weight) - float(y.weight)) > tol:
            return False
        if abs(float(x.birth) - float(y.birth)) > tol:
            return False
        dx = math.inf if x.death is None else float(x.death)
        dy = math.inf if y.death is None else float(y.death)
        if dx != dy and abs(dx - dy) > tol:
            return False
    return True
