"""Surface probing shared by the grasp samplers.

Grasps are validated against a dense, seeded surface sample of the mesh:
the points inside the finger slab determine the closing width and the
contact patches; contact normals feed the antipodal / friction-cone test.
"""

from dataclasses import dataclass

import numpy as np

CONTACT_BAND_MM = 0.35
DEFAULT_SURFACE_SAMPLES = 20000


def surface_samples(mesh, n=DEFAULT_SURFACE_SAMPLES, seed=0):
    """Seeded area-uniform surface points with outward triangle normals."""
    areas = mesh.areas
    total = areas.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    tri_idx = rng.choice(len(areas), size=n, p=areas / total)
    r1 = rng.random(n)
    r2 = rng.random(n)
    s = np.sqrt(r1)
    a = 1.0 - s
    b = s * (1.0 - r2)
    c = s * r2
    p = mesh.tri_points[tri_idx]
    pts = a[:, None] * p[:, 0] + b[:, None] * p[:, 1] + c[:, None] * p[:, 2]
    nrm = mesh.normals[tri_idx]
    return pts, nrm


@dataclass
class ProbeResult:
    ok: bool
    width: float = 0.0
    x_center: float = 0.0          # offset of the contact midplane from x=0
    contact_a: np.ndarray = None   # (point, normal) stacked (2, 3), gripper frame
    contact_b: np.ndarray = None
    reason: str = ""


def probe_grasp(points_g, normals_g, gripper, friction=0.5,
                antipodal_tol_deg=10.0, require_sensor_contact=True):
    """Validate a grasp given surface points already in the gripper frame.

    Checks, in order: the finger slab is non-empty on both sides, the
    closing width fits the opening, the sensed window sees both contacts,
    and the contact normals pass the antipodal + friction-cone test.
    """
    fw, fl = gripper.finger_width, gripper.finger_length
    sw, sh = gripper.sensor_plane_size
    in_slab = (np.abs(points_g[:, 1]) <= fw / 2.0) & \
              (points_g[:, 2] >= 0.0) & (points_g[:, 2] <= fl)
    if not in_slab.any():
        return ProbeResult(False, reason="no surface inside finger slab")
    px = points_g[in_slab, 0]
    x_hi = px.max()
    x_lo = px.min()
    width = float(x_hi - x_lo)
    if width > gripper.max_opening or width < gripper.min_opening:
        return ProbeResult(False, width=width, reason="width outside opening range")

    slab_pts = points_g[in_slab]
    slab_nrm = normals_g[in_slab]
    near_a = slab_pts[:, 0] >= x_hi - CONTACT_BAND_MM
    near_b = slab_pts[:, 0] <= x_lo + CONTACT_BAND_MM
    if require_sensor_contact:
        in_window = (np.abs(slab_pts[:, 1]) <= sw / 2.0) & (slab_pts[:, 2] <= sh)
        if not (near_a & in_window).any() or not (near_b & in_window).any():
            return ProbeResult(False, width=width, reason="contact outside sensor window")

    cone = np.arctan(friction)
    cos_cone = np.cos(cone)
    x_axis = np.array([1.0, 0.0, 0.0])
    # Contact normals: average the band normals that actually face the
    # fingers, so stray end-face points cannot skew the direction.
    press_a = slab_nrm[near_a] @ x_axis >= cos_cone - 1e-12
    press_b = slab_nrm[near_b] @ -x_axis >= cos_cone - 1e-12
    n_a = slab_nrm[near_a][press_a].mean(axis=0) if press_a.any() \
        else slab_nrm[near_a].mean(axis=0)
    n_b = slab_nrm[near_b][press_b].mean(axis=0) if press_b.any() \
        else slab_nrm[near_b].mean(axis=0)
    n_a /= max(np.linalg.norm(n_a), 1e-12)
    n_b /= max(np.linalg.norm(n_b), 1e-12)
    ang_apart = np.degrees(np.arccos(np.clip(-np.dot(n_a, n_b), -1.0, 1.0)))
    if ang_apart > antipodal_tol_deg:
        return ProbeResult(False, width=width, reason="normals not antipodal")
    # Closing force on A points along -x into the surface: n_a within cone of +x.
    if np.arccos(np.clip(np.dot(n_a, x_axis), -1.0, 1.0)) > cone:
        return ProbeResult(False, width=width, reason="contact A outside friction cone")
    if np.arccos(np.clip(np.dot(n_b, -x_axis), -1.0, 1.0)) > cone:
        return ProbeResult(False, width=width, reason="contact B outside friction cone")
    # Reject edge pinches: most band points must individually sit in the cone,
    # otherwise the mean normal papers over a crease.
    if np.mean(slab_nrm[near_a] @ x_axis >= cos_cone - 1e-12) < 0.7:
        return ProbeResult(False, width=width, reason="contact A patch not flat")
    if np.mean(slab_nrm[near_b] @ -x_axis >= cos_cone - 1e-12) < 0.7:
        return ProbeResult(False, width=width, reason="contact B patch not flat")

    pa = slab_pts[near_a].mean(axis=0)
    pb = slab_pts[near_b].mean(axis=0)
    return ProbeResult(True, width=width, x_center=float((x_hi + x_lo) / 2.0),
                       contact_a=np.stack([pa, n_a]),
                       contact_b=np.stack([pb, n_b]))
