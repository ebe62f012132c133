import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickplace.geometry import Pose, add_distance, sample_point_cloud
from pickplace.geometry.primitives import box_mesh

CUBE = box_mesh((20.0, 20.0, 20.0))


def test_face_fractions_area_uniform():
    cloud = sample_point_cloud(CUBE, 10000, seed=11)
    pts = cloud.points
    for axis in range(3):
        for side in (-10.0, 10.0):
            frac = np.mean(np.abs(pts[:, axis] - side) < 1e-9)
            assert abs(frac - 1 / 6) < 0.02   # binomial CI at n=10000


def test_single_point_on_surface():
    cloud = sample_point_cloud(CUBE, 1, seed=0)
    p = cloud.points[0]
    assert np.abs(p).max() <= 10.0 + 1e-9
    assert np.isclose(np.abs(p).max(), 10.0, atol=1e-9)   # on a face plane


def test_determinism_bitwise():
    a = sample_point_cloud(CUBE, 500, seed=42)
    b = sample_point_cloud(CUBE, 500, seed=42)
    assert np.array_equal(a.points, b.points)
    c = sample_point_cloud(CUBE, 500, seed=43)
    assert not np.array_equal(a.points, c.points)


def test_n_zero_rejected():
    with pytest.raises(ValueError):
        sample_point_cloud(CUBE, 0, seed=0)


CLOUD = sample_point_cloud(CUBE, 512, seed=1)


def test_add_identity():
    p = Pose.from_axis_angle([1, 2, 3], 0.7, trans=[5, 6, 7])
    assert add_distance(CLOUD, p, p) == 0.0


def test_add_pure_translation_exact():
    a = Pose.identity()
    b = Pose.from_translation([3.0, 4.0, 0.0])
    assert abs(add_distance(CLOUD, a, b) - 5.0) < 1e-12


def test_add_rotation_matches_brute_force():
    a = Pose.identity()
    b = Pose.from_axis_angle([0, 0, 1], np.pi / 2)
    got = add_distance(CLOUD, a, b)
    # Independent per-point loop.
    total = 0.0
    rot = b.rotation_matrix()
    for p in CLOUD.points:
        q = rot @ p + b.trans
        total += float(np.sqrt(((p - q) ** 2).sum()))
    assert abs(got - total / len(CLOUD.points)) < 1e-9


@st.composite
def small_poses(draw):
    q = [draw(st.floats(-1, 1)) for _ in range(4)]
    if all(abs(v) < 1e-3 for v in q):
        q[0] = 1.0
    t = [draw(st.floats(-30, 30)) for _ in range(3)]
    return Pose(np.array(q), np.array(t))


@given(small_poses(), small_poses(), small_poses())
@settings(max_examples=40, deadline=None)
def test_add_metric_axioms(a, b, c):
    dab = add_distance(CLOUD, a, b)
    dba = add_distance(CLOUD, b, a)
    dac = add_distance(CLOUD, a, c)
    dbc = add_distance(CLOUD, b, c)
    assert abs(dab - dba) < 1e-9
    assert dab >= 0
    assert dac <= dab + dbc + 1e-9
