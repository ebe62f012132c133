import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickplace.geometry import Pose


def random_pose(rng):
    q = rng.normal(size=4)
    return Pose(q, rng.uniform(-100, 100, 3))


@st.composite
def poses(draw):
    q = [draw(st.floats(-1, 1)) for _ in range(4)]
    if all(abs(v) < 1e-3 for v in q):
        q[0] = 1.0
    t = [draw(st.floats(-50, 50)) for _ in range(3)]
    return Pose(np.array(q), np.array(t))


def test_quaternion_normalized_after_construction():
    p = Pose(np.array([2.0, 0.0, 0.0, 0.0]), np.zeros(3))
    assert abs(np.linalg.norm(p.quat) - 1.0) < 1e-9


def test_compose_inverse_is_identity():
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = random_pose(rng)
        e = p.compose(p.inverse())
        assert e.rotation_angle_deg() < 1e-9 * 180 / np.pi + 1e-9
        assert np.linalg.norm(e.trans) < 1e-9


@given(poses(), poses(), poses())
@settings(max_examples=60, deadline=None)
def test_composition_associative(a, b, c):
    left = a.compose(b).compose(c)
    right = a.compose(b.compose(c))
    assert np.allclose(left.quat, right.quat, atol=1e-9)
    assert np.linalg.norm(left.trans - right.trans) < 1e-6


@given(poses())
@settings(max_examples=60, deadline=None)
def test_rotation_matrix_orthonormal(p):
    r = p.rotation_matrix()
    assert np.abs(r @ r.T - np.eye(3)).max() < 1e-9
    assert abs(np.linalg.det(r) - 1.0) < 1e-9


def test_apply_matches_matrix():
    rng = np.random.default_rng(5)
    p = random_pose(rng)
    pts = rng.uniform(-10, 10, (50, 3))
    hom = np.c_[pts, np.ones(50)] @ p.matrix().T
    assert np.allclose(p.apply(pts), hom[:, :3], atol=1e-12)


def test_from_matrix_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(100):
        p = random_pose(rng)
        q = Pose.from_matrix(p.matrix())
        assert np.allclose(p.quat, q.quat, atol=1e-9)
        assert np.allclose(p.trans, q.trans, atol=1e-9)


def test_axis_angle():
    p = Pose.from_axis_angle([0, 0, 1], np.pi / 2)
    assert np.allclose(p.apply(np.array([1.0, 0, 0])), [0, 1, 0], atol=1e-12)
    assert abs(p.rotation_angle_deg() - 90.0) < 1e-9


def test_zero_quaternion_rejected():
    with pytest.raises(ValueError):
        Pose(np.zeros(4), np.zeros(3))
