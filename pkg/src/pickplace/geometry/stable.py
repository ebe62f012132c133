"""Resting configurations of a rigid object on a flat table (z = 0).

A convex-hull face yields a stable pose when the center of mass projects
strictly inside the face polygon (quasi-static criterion). Near-duplicate
poses (object orientation within 1 degree and 0.5 mm) are merged with
their weights summed.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from ..errors import NotWatertight
from .pose import Pose

MERGE_ANGLE_DEG = 1.0
MERGE_TRANS_MM = 0.5
_COPLANAR_DECIMALS = 6


@dataclass(frozen=True)
class StablePose:
    pose: Pose                      # object frame -> table frame, support on z=0
    support_polygon: np.ndarray     # (K, 2) convex polygon (table x, y)
    probability_weight: float       # fraction of hull faces mapping here

    def to_dict(self):
        return {
            "pose": self.pose.to_dict(),
            "support_polygon": [[float(a), float(b)] for a, b in self.support_polygon],
            "probability_weight": float(self.probability_weight),
        }

    @staticmethod
    def from_dict(d):
        return StablePose(Pose.from_dict(d["pose"]),
                          np.asarray(d["support_polygon"], dtype=np.float64),
                          float(d["probability_weight"]))


def _rotation_to_minus_z(normal):
    """Minimal rotation taking `normal` to (0, 0, -1)."""
    n = normal / np.linalg.norm(normal)
    target = np.array([0.0, 0.0, -1.0])
    c = float(np.dot(n, target))
    if c > 1.0 - 1e-12:
        return Pose.identity()
    if c < -1.0 + 1e-12:
        return Pose.from_axis_angle([1.0, 0.0, 0.0], np.pi)
    axis = np.cross(n, target)
    return Pose.from_axis_angle(axis, float(np.arccos(np.clip(c, -1.0, 1.0))))


def _point_strictly_inside_convex(poly, point, margin=1e-9):
    """poly: (K, 2) counter-clockwise convex polygon."""
    k = len(poly)
    if k < 3:
        return False
    for i in range(k):
        a = poly[i]
        b = poly[(i + 1) % k]
        edge = b - a
        nrm = np.linalg.norm(edge)
        if nrm < 1e-12:
            continue
        cross = edge[0] * (point[1] - a[1]) - edge[1] * (point[0] - a[0])
        if cross / nrm <= margin:
            return False
    return True


def _order_ccw(points2d):
    c = points2d.mean(axis=0)
    ang = np.arctan2(points2d[:, 1] - c[1], points2d[:, 0] - c[0])
    return points2d[np.argsort(ang, kind="stable")]


def compute_stable_poses(mesh):
    """All quasi-statically stable resting poses of a watertight mesh."""
    if not mesh.watertight:
        raise NotWatertight("stable-pose computation requires a watertight mesh")
    hull = ConvexHull(mesh.vertices)
    simplex_pts = mesh.vertices[hull.simplices]
    normals = np.cross(simplex_pts[:, 1] - simplex_pts[:, 0],
                       simplex_pts[:, 2] - simplex_pts[:, 0])
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    # Orient outward (away from the hull centroid).
    centroid = mesh.vertices[hull.vertices].mean(axis=0)
    flip = np.einsum("ij,ij->i", normals, simplex_pts[:, 0] - centroid) < 0
    normals[flip] *= -1

    # Group coplanar hull simplices into faces.
    offsets = np.einsum("ij,ij->i", normals, simplex_pts[:, 0])
    keys = np.round(np.column_stack([normals, offsets]), _COPLANAR_DECIMALS)
    groups = {}
    for i, key in enumerate(map(tuple, keys)):
        groups.setdefault(key, []).append(i)

    total_simplices = len(hull.simplices)
    candidates = []
    for key, members in sorted(groups.items()):
        normal = normals[members[0]]
        verts_idx = np.unique(hull.simplices[members])
        face_pts = mesh.vertices[verts_idx]
        rot = _rotation_to_minus_z(normal)
        rotated_face = rot.apply(face_pts)
        rotated_com = rot.apply(mesh.com)
        poly = _order_ccw(_convex_2d(rotated_face[:, :2]))
        if not _point_strictly_inside_convex(poly, rotated_com[:2]):
            continue
        # Seat the support plane on z=0, center the COM over the origin.
        rotated_all = rot.apply(mesh.vertices)
        dz = rotated_all[:, 2].min()
        shift = np.array([-rotated_com[0], -rotated_com[1], -dz])
        pose = Pose(rot.quat, rot.trans + shift)
        poly_centered = poly + shift[:2]
        weight = len(members) / total_simplices
        candidates.append(StablePose(pose, poly_centered, weight))

    merged = _merge_close(candidates)
    total_w = sum(sp.probability_weight for sp in merged)
    out = [StablePose(sp.pose, sp.support_polygon, sp.probability_weight / total_w)
           for sp in merged]
    # Deterministic, interpretable order: likeliest and lowest rests first.
    def sort_key(sp):
        height = mesh.vertices @ sp.pose.rotation_matrix()[2] + sp.pose.trans[2]
        return (-sp.probability_weight, round(float(height.max()), 6),
                tuple(np.round(sp.pose.quat, 9)))

    return sorted(out, key=sort_key)


def _convex_2d(points2d):
    if len(points2d) <= 3:
        return points2d
    hull = ConvexHull(points2d)
    return points2d[hull.vertices]


def _merge_close(poses):
    merged = []
    for sp in poses:
        for i, other in enumerate(merged):
            if (sp.pose.angle_to_deg(other.pose) < MERGE_ANGLE_DEG
                    and np.linalg.norm(sp.pose.trans - other.pose.trans) < MERGE_TRANS_MM):
                merged[i] = StablePose(other.pose, other.support_polygon,
                                       other.probability_weight + sp.probability_weight)
                break
        else:
            merged.append(sp)
    return merged
