"""Oriented-box collision utilities shared by grasp sampling and regrasping.

Boxes are (center (3,), axes (3,3) row-per-axis unit vectors, half (3,)).
A gripper is modeled as three boxes: two fingers and a palm.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry.pose import Pose


@dataclass(frozen=True)
class Obb:
    center: np.ndarray
    axes: np.ndarray     # rows are unit axis vectors in the parent frame
    half: np.ndarray

    @staticmethod
    def axis_aligned(lo, hi):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        return Obb((lo + hi) / 2.0, np.eye(3), (hi - lo) / 2.0)

    def transformed(self, pose: Pose):
        r = pose.rotation_matrix()
        return Obb(pose.apply(self.center), self.axes @ r.T, self.half.copy())

    def corners(self):
        signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1)
                          for sz in (-1, 1)], dtype=np.float64)
        return self.center + (signs * self.half) @ self.axes

    def min_z(self):
        return float(self.center[2] - np.abs(self.axes[:, 2]) @ self.half)


def pack_boxes(boxes):
    centers = np.stack([b.center for b in boxes])
    axes = np.stack([b.axes for b in boxes])
    half = np.stack([b.half for b in boxes])
    return centers, axes, half


def boxes_intersect_mesh(boxes, mesh):
    """True for each box that overlaps any mesh triangle."""
    centers, axes, half = pack_boxes(boxes)
    return kernels.boxes_hit_mesh(centers, axes, half, mesh.vertices, mesh.triangles)


def any_box_intersects_mesh(boxes, mesh):
    return bool(boxes_intersect_mesh(boxes, mesh).any())


def box_set_gap(boxes_a, boxes_b):
    """Minimum SAT gap over all pairs between the two box sets.

    Positive: sets disjoint, value is a lower bound on their distance.
    Non-positive: at least one pair overlaps.
    """
    na, nb = len(boxes_a), len(boxes_b)
    ca, aa, ha = pack_boxes(boxes_a)
    cb, ab, hb = pack_boxes(boxes_b)
    ia, ib = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
    ia = ia.ravel()
    ib = ib.ravel()
    gaps = kernels.obb_pair_gap(ca[ia], aa[ia], ha[ia], cb[ib], ab[ib], hb[ib])
    return float(gaps.min())


def point_in_mesh(point, mesh, bvh=None):
    """Ray-parity containment test (watertight meshes)."""
    from .render.raycast import RayScene   # local import to avoid a cycle

    scene = RayScene(mesh) if bvh is None else bvh
    # Irrational direction avoids edge-aligned degeneracies.
    d = np.array([[0.57735026, 0.57735027, 0.57735028]])
    origin = np.asarray(point, dtype=np.float64).reshape(1, 3)
    count = 0
    start = origin.copy()
    for _ in range(64):
        t, tri = scene.cast(start, d)
        if not np.isfinite(t[0]):
            break
        count += 1
        start = start + d * (t[0] + 1e-7)
    return count % 2 == 1
