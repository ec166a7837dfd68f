"""Shared fixtures and independent reference oracles for the test suite."""

import numpy as np
import pytest

from qstoch.quaternion import Quaternion


def left_mult_matrix(q: Quaternion) -> np.ndarray:
    """4x4 real matrix of left multiplication by q.

    Independent formulation of the Hamilton product used as an oracle: the
    product q*r equals left_mult_matrix(q) @ r.as_array().
    """
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def ref_mul(q: Quaternion, r: Quaternion) -> Quaternion:
    return Quaternion(*(left_mult_matrix(q) @ r.as_array()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240819)


@pytest.fixture
def random_quaternion(rng):
    def draw(unit=False):
        v = rng.standard_normal(4)
        if unit:
            v /= np.linalg.norm(v)
        return Quaternion(*v)
    return draw
