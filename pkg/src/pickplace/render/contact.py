"""Simulated tactile contact masks.

The sensor is an imaginary plane on each finger's inner face. The object
(posed in the gripper frame) is translated along the sensor normal until
its closest point touches the plane; the mask marks pixels where it would
then sink in by at most the penetration depth.

Gripper frame convention used package-wide: origin at the tool center
point on the fingertip plane, x along the closing axis (finger A on +x),
z from the fingertips toward the palm, y = z cross x. The sensor window
covers y in [-w/2, w/2] and z in [0, h] (w, h = sensor plane size).
"""

import numpy as np

from ..errors import EmptyContact
from .raycast import RayScene


def _window_rays(gripper, side, mm_per_px, x_start):
    w_mm, h_mm = gripper.sensor_plane_size
    n_cols = int(round(w_mm / mm_per_px))
    n_rows = int(round(h_mm / mm_per_px))
    ys = (np.arange(n_cols) + 0.5) * mm_per_px - w_mm / 2.0
    zs = (np.arange(n_rows) + 0.5) * mm_per_px
    yy, zz = np.meshgrid(ys, zs)
    origins = np.stack([np.full(yy.size, x_start), yy.ravel(), zz.ravel()], axis=1)
    direction = np.array([-1.0, 0.0, 0.0]) if side == "A" else np.array([1.0, 0.0, 0.0])
    dirs = np.broadcast_to(direction, origins.shape).copy()
    return origins, dirs, (n_rows, n_cols)


def contact_depths(mesh, object_in_gripper, gripper, side, scene=None,
                   mm_per_px=0.2):
    """Orthographic depths from the sensor plane, and their minimum.

    Rays are cast in the object's own frame (one shared BVH per mesh), so
    repeated calls with different grasps are cheap. Returns (depths, dmin)
    with depths in mm from the start plane, inf where the window misses.
    """
    if scene is None:
        scene = RayScene(mesh)
    radius = float(np.linalg.norm(scene.mesh.vertices, axis=1).max())
    span = radius + float(np.linalg.norm(object_in_gripper.trans)) + 1.0
    x_start = span if side == "A" else -span
    origins, dirs, shape = _window_rays(gripper, side, mm_per_px, x_start)
    gripper_in_object = object_in_gripper.inverse()
    origins = gripper_in_object.apply(origins)
    dirs = gripper_in_object.rotate(dirs)
    t, _ = scene.cast(origins, dirs)
    depths = t.reshape(shape)
    hit = np.isfinite(depths)
    if not hit.any():
        raise EmptyContact(f"object does not face sensor window (side {side})")
    return depths, float(depths[hit].min()), x_start


def render_contact(mesh, object_in_gripper, gripper, side, scene=None,
                   penetration_mm=1.0, mm_per_px=0.2):
    """Binary contact mask for one finger. Raises EmptyContact when the
    object lies entirely outside the sensor window."""
    depths, dmin, _ = contact_depths(mesh, object_in_gripper, gripper, side,
                                     scene=scene, mm_per_px=mm_per_px)
    return (depths - dmin) <= penetration_mm


def measured_width(mesh, object_in_gripper, gripper, scene=None, mm_per_px=0.2):
    """Distance between the two contact planes once both fingers touch (mm)."""
    _, dmin_a, xa = contact_depths(mesh, object_in_gripper, gripper, "A",
                                   scene=scene, mm_per_px=mm_per_px)
    _, dmin_b, xb = contact_depths(mesh, object_in_gripper, gripper, "B",
                                   scene=scene, mm_per_px=mm_per_px)
    return float((xa - dmin_a) - (xb + dmin_b))


def contact_pair(mesh, object_in_gripper, gripper, scene=None,
                 penetration_mm=1.0, mm_per_px=0.2):
    """Both finger masks and the measured width in one pass.

    Returns (mask_a, mask_b, width_mm). Raises EmptyContact if either
    window misses the object.
    """
    da, dmin_a, xa = contact_depths(mesh, object_in_gripper, gripper, "A",
                                    scene=scene, mm_per_px=mm_per_px)
    db, dmin_b, xb = contact_depths(mesh, object_in_gripper, gripper, "B",
                                    scene=scene, mm_per_px=mm_per_px)
    mask_a = (da - dmin_a) <= penetration_mm
    mask_b = (db - dmin_b) <= penetration_mm
    width = float((xa - dmin_a) - (xb + dmin_b))
    return mask_a, mask_b, width
