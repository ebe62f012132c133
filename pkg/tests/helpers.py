"""Shared test fixtures: fabricated libraries with controlled geometry."""

import numpy as np

from pickplace.geometry import Pose, sample_point_cloud
from pickplace.geometry.primitives import box_mesh
from pickplace.graspgen.table import TableGrasp
from pickplace.perception.library import GraspLibrary


def make_library(offsets_mm, depth_desc, tactile_desc, widths,
                 beta_depth=10.0, beta_tactile=10.0, quats=None,
                 gripper_xy=None):
    """Library of grasps at pure-translation offsets (ADD = offset norm)."""
    mesh = box_mesh((20.0, 20.0, 20.0))
    cloud = sample_point_cloud(mesh, 256, seed=0)
    grasps = []
    for i, off in enumerate(offsets_mm):
        quat = quats[i] if quats is not None else np.array([1.0, 0, 0, 0])
        pose = Pose(quat, np.asarray(off, dtype=np.float64))
        gx = gripper_xy[i] if gripper_xy is not None else (0.0, 0.0)
        grip = Pose.from_translation([gx[0], gx[1], 1.0])
        grasps.append(TableGrasp(i, pose, float(widths[i]), 0, (0.0, 0.0), grip))
    return GraspLibrary(
        grasps=grasps,
        depth_descriptors=np.asarray(depth_desc, dtype=np.float32),
        tactile_descriptors=np.asarray(tactile_desc, dtype=np.float32),
        widths=np.asarray(widths, dtype=np.float64),
        beta_depth=beta_depth,
        beta_tactile=beta_tactile,
        cloud=cloud,
    )


def one_hot_descriptors(n, dim, scale=1.0, duplicates=None):
    """Row i = scale * e_i, optionally aliasing rows to make exact twins."""
    desc = np.zeros((n, dim), dtype=np.float32)
    for i in range(n):
        src = duplicates.get(i, i) if duplicates else i
        desc[i, src % dim] = scale
    return desc
