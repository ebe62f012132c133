"""Pairwise regrasp feasibility and its precomputed cache.

A handoff between two grasps is feasible when the two posed gripper
volumes (finger + palm boxes in the object frame) are disjoint and
neither penetrates the object. Edge quality is the separating-axis gap
clearance scaled by 5 mm and clamped to [0, 1]; the SAT gap is a lower
bound on the true clearance, which is exact for face-face closest
features and conservative otherwise.
"""

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..collision import boxes_intersect_mesh
from ..errors import CacheInvalid

CLEARANCE_SCALE_MM = 5.0
_MAGIC = b"PPEDGE01"


def gripper_box_arrays(poses_in_object, widths, gripper):
    """Stacked (N, 3, ...) box parameter arrays for grasps posed in the
    object frame (poses map gripper frame -> object frame)."""
    centers = np.empty((len(poses_in_object), 3, 3))
    axes = np.empty((len(poses_in_object), 3, 3, 3))
    half = np.empty((len(poses_in_object), 3, 3))
    for i, (pose, width) in enumerate(zip(poses_in_object, widths)):
        for k, box in enumerate(gripper.posed_boxes(pose, width)):
            centers[i, k] = box.center
            axes[i, k] = box.axes
            half[i, k] = box.half
    return centers, axes, half


def pair_gaps(arrays_a, arrays_b, ii, jj, chunk=20000):
    """Minimum SAT gap between the 3-box gripper volumes for index pairs."""
    ca, aa, ha = arrays_a
    cb, ab, hb = arrays_b
    n = len(ii)
    out = np.empty(n)
    kk, ll = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    kk = kk.ravel()
    ll = ll.ravel()
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        i = np.repeat(ii[lo:hi], 9)
        j = np.repeat(jj[lo:hi], 9)
        k = np.tile(kk, hi - lo)
        m = np.tile(ll, hi - lo)
        gaps = kernels.obb_pair_gap(ca[i, k], aa[i, k], ha[i, k],
                                    cb[j, m], ab[j, m], hb[j, m])
        out[lo:hi] = gaps.reshape(-1, 9).min(axis=1)
    return out


def check_regrasp(g1, g2, gripper, mesh=None):
    """Feasibility and quality of handing off between two grasps."""
    pose1 = g1.object_in_gripper.inverse()
    pose2 = g2.object_in_gripper.inverse()
    a = gripper_box_arrays([pose1], [g1.width], gripper)
    b = gripper_box_arrays([pose2], [g2.width], gripper)
    gap = float(pair_gaps(a, b, np.array([0]), np.array([0]))[0])
    feasible = gap > 0.0
    if feasible and mesh is not None:
        for pose, width in ((pose1, g1.width), (pose2, g2.width)):
            if boxes_intersect_mesh(gripper.posed_boxes(pose, width + 0.02),
                                    mesh).any():
                feasible = False
                break
    quality = float(np.clip(gap / CLEARANCE_SCALE_MM, 0.0, 1.0)) if feasible else 0.0
    return feasible, quality


@dataclass
class RegraspEdgeCache:
    feasible: np.ndarray      # (N, N) bool, symmetric, diagonal False
    quality: np.ndarray       # (N, N) float32, 0 where infeasible
    meta: dict

    def __post_init__(self):
        if self.feasible.shape != self.quality.shape:
            raise ValueError("shape mismatch")

    def save(self, path, manifest_path=None):
        n = len(self.feasible)
        bits = np.packbits(self.feasible.ravel())
        q = np.ascontiguousarray(self.quality, dtype="<f4")
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<I", n))
            f.write(bits.tobytes())
            f.write(q.tobytes())
        if manifest_path:
            with open(manifest_path, "w") as f:
                json.dump({"count": n, "format": "packed-bitset+f32",
                           **self.meta}, f, indent=1)

    @staticmethod
    def load(path):
        if not os.path.exists(path):
            raise CacheInvalid(f"edge cache missing: {path}")
        with open(path, "rb") as f:
            blob = f.read()
        if blob[:8] != _MAGIC:
            raise CacheInvalid("edge cache has a wrong magic header")
        (n,) = struct.unpack_from("<I", blob, 8)
        off = 12
        nbits = n * n
        nbytes = (nbits + 7) // 8
        bits = np.frombuffer(blob, dtype=np.uint8, count=nbytes, offset=off)
        feasible = np.unpackbits(bits, count=nbits).astype(bool).reshape(n, n)
        off += nbytes
        quality = np.frombuffer(blob, dtype="<f4", count=n * n,
                                offset=off).reshape(n, n).copy()
        return RegraspEdgeCache(feasible, quality, {})


def build_edge_cache(grasps, gripper, mesh=None, meta=None):
    """Evaluate all grasp pairs; symmetric by construction."""
    n = len(grasps)
    feasible = np.zeros((n, n), dtype=bool)
    quality = np.zeros((n, n), dtype=np.float32)
    if n > 1:
        poses = [g.object_in_gripper.inverse() for g in grasps]
        widths = [g.width for g in grasps]
        arrays = gripper_box_arrays(poses, widths, gripper)
        iu, ju = np.triu_indices(n, k=1)
        gaps = pair_gaps(arrays, arrays, iu, ju)
        ok = gaps > 0.0
        if mesh is not None:
            pen = np.zeros(n, dtype=bool)
            for i, (pose, width) in enumerate(zip(poses, widths)):
                pen[i] = boxes_intersect_mesh(
                    gripper.posed_boxes(pose, width + 0.02), mesh).any()
            ok &= ~pen[iu] & ~pen[ju]
        q = np.where(ok, np.clip(gaps / CLEARANCE_SCALE_MM, 0.0, 1.0), 0.0)
        feasible[iu, ju] = ok
        feasible[ju, iu] = ok
        quality[iu, ju] = q.astype(np.float32)
        quality[ju, iu] = q.astype(np.float32)
    return RegraspEdgeCache(feasible, quality, dict(meta or {}))
