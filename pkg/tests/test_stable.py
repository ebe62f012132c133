import numpy as np
import pytest

from pickplace.errors import NotWatertight
from pickplace.geometry import TriMesh, compute_stable_poses
from pickplace.geometry.primitives import box_mesh, cone_mesh, icosphere
from pickplace.geometry.stable import _point_strictly_inside_convex


def test_cube_has_six_poses_weight_sixth():
    poses = compute_stable_poses(box_mesh((20, 20, 20)))
    assert len(poses) == 6
    for sp in poses:
        assert abs(sp.probability_weight - 1 / 6) < 1e-12


def test_support_plane_on_table():
    mesh = box_mesh((10, 24, 36))
    for sp in compute_stable_poses(mesh):
        z = sp.pose.apply(mesh.vertices)[:, 2]
        assert abs(z.min()) < 1e-6
        # COM projects strictly inside the support polygon.
        com = sp.pose.apply(mesh.com)
        assert _point_strictly_inside_convex(sp.support_polygon, com[:2])


def test_cone_apex_contact_absent():
    # Balancing on the tip (axis straight down) projects the COM onto a
    # single point, never strictly inside a support polygon.
    mesh = cone_mesh(radius=15.0, height=30.0)
    for sp in compute_stable_poses(mesh):
        axis_down = sp.pose.rotate(np.array([0.0, 0.0, 1.0]))[2]
        assert axis_down > -0.9


def test_cone_base_is_stable():
    mesh = cone_mesh(radius=15.0, height=30.0)
    poses = compute_stable_poses(mesh)
    down = [sp for sp in poses
            if sp.pose.rotate(np.array([0.0, 0.0, 1.0]))[2] > 0.99]
    assert len(down) == 1   # resting on the base, apex up


def test_icosphere_poses_satisfy_com_check():
    mesh = icosphere(10.0, 1)
    poses = compute_stable_poses(mesh)
    assert len(poses) >= 1
    total = sum(sp.probability_weight for sp in poses)
    assert abs(total - 1.0) < 1e-12
    for sp in poses:
        com = sp.pose.apply(mesh.com)
        assert _point_strictly_inside_convex(sp.support_polygon, com[:2])


def test_open_mesh_rejected():
    v = np.array([[0, 0, 0], [10, 0, 0], [0, 10, 0]], dtype=float)
    open_mesh = TriMesh(v, np.array([[0, 1, 2]]))
    with pytest.raises(NotWatertight):
        compute_stable_poses(open_mesh)


def test_stable_pose_is_fixed_point():
    # Re-running the quasi-static check on an applied stable pose changes nothing.
    mesh = box_mesh((12, 18, 24))
    for sp in compute_stable_poses(mesh):
        posed = mesh.transformed(sp.pose)
        again = compute_stable_poses(posed)
        identities = [q for q in again if q.pose.rotation_angle_deg() < 1e-6]
        assert len(identities) == 1
