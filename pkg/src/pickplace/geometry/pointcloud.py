"""Surface point clouds and the average-distance pose metric.

Sampling is area-uniform with a counter-based (Philox) generator, so a
given (mesh, n, seed) always produces the identical cloud.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateMesh

DEFAULT_CLOUD_SIZE = 2048


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray   # (N, 3) mm

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 1:
            raise ValueError("point cloud must be a non-empty (N, 3) array")
        object.__setattr__(self, "points", pts)

    @property
    def count(self):
        return len(self.points)


def sample_point_cloud(mesh, n, seed=0):
    """Sample n points area-uniformly on the mesh surface."""
    if n < 1:
        raise ValueError("n must be >= 1")
    areas = mesh.areas
    total = areas.sum()
    if total <= 0:
        raise DegenerateMesh("mesh has zero surface area")
    rng = np.random.Generator(np.random.Philox(seed))
    tri_idx = rng.choice(len(areas), size=n, p=areas / total)
    r1 = rng.random(n)
    r2 = rng.random(n)
    # Uniform barycentric via square-root trick.
    s = np.sqrt(r1)
    a = 1.0 - s
    b = s * (1.0 - r2)
    c = s * r2
    p = mesh.tri_points[tri_idx]
    pts = a[:, None] * p[:, 0] + b[:, None] * p[:, 1] + c[:, None] * p[:, 2]
    return PointCloud(pts)


def add_distance(cloud, pose_a, pose_b):
    """Mean distance between the cloud transformed by the two poses (mm)."""
    pa = pose_a.apply(cloud.points)
    pb = pose_b.apply(cloud.points)
    return float(np.linalg.norm(pa - pb, axis=1).mean())
