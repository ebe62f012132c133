"""Pinhole camera model for the overhead depth sensor."""

from dataclasses import dataclass, field

import numpy as np

from ..geometry.pose import Pose


@dataclass
class VirtualCamera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    extrinsic: Pose = field(default_factory=Pose.identity)   # camera in world

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside the image")

    @staticmethod
    def top_down(height_mm, fx, width, height, fy=None):
        """Camera on the +z axis looking straight down at the table plane."""
        fy = fx if fy is None else fy
        # Camera frame: +z optical axis toward the scene (down), +x right.
        # World pose: rotate 180 deg about x so camera z maps to world -z.
        ext = Pose.from_axis_angle([1.0, 0.0, 0.0], np.pi,
                                   trans=[0.0, 0.0, height_mm])
        return VirtualCamera(fx=fx, fy=fy, cx=(width - 1) / 2.0,
                             cy=(height - 1) / 2.0, width=width, height=height,
                             extrinsic=ext)

    def pixel_rays(self):
        """World-frame ray origins and directions, scaled to unit camera-z.

        With that scaling the ray parameter t is the camera z-depth.
        """
        u = np.arange(self.width, dtype=np.float64)
        v = np.arange(self.height, dtype=np.float64)
        uu, vv = np.meshgrid(u, v)
        x = (uu - self.cx) / self.fx
        y = (vv - self.cy) / self.fy
        dirs_cam = np.stack([x, y, np.ones_like(x)], axis=-1).reshape(-1, 3)
        r = self.extrinsic.rotation_matrix()
        dirs = dirs_cam @ r.T
        origins = np.broadcast_to(self.extrinsic.trans, dirs.shape).copy()
        return origins, dirs

    def project(self, points_world):
        """Project world points to (u, v) pixel coordinates and camera depth."""
        pts = np.atleast_2d(np.asarray(points_world, dtype=np.float64))
        cam = self.extrinsic.inverse().apply(pts)
        z = cam[:, 2]
        u = self.fx * cam[:, 0] / z + self.cx
        v = self.fy * cam[:, 1] / z + self.cy
        return u, v, z

    def unproject(self, u, v, depth):
        """Pixel + camera z-depth back to a world point."""
        x = (np.asarray(u, dtype=np.float64) - self.cx) / self.fx
        y = (np.asarray(v, dtype=np.float64) - self.cy) / self.fy
        cam = np.stack(np.broadcast_arrays(x * depth, y * depth,
                                           np.asarray(depth, dtype=np.float64)), axis=-1)
        return self.extrinsic.apply(cam.reshape(-1, 3))

    def mm_per_px_at(self, depth_mm):
        return depth_mm / self.fx
