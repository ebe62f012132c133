"""Scene depth rendering: nearest ray-triangle hit per pixel, optional table."""

import numpy as np

from .images import DEPTH_SENTINEL, DepthImage
from .raycast import RayScene


def render_depth(mesh, object_pose, camera, table=True, scene=None):
    """Render the object (posed in world) and optionally the z=0 table plane.

    Depth is the camera z-depth in mm; pixels that hit nothing get the
    sentinel. Pass a prebuilt RayScene of the *posed* mesh to skip the BVH
    rebuild; otherwise the mesh is transformed by object_pose here.
    """
    origins, dirs = camera.pixel_rays()
    if scene is None:
        scene = RayScene(mesh.transformed(object_pose))
    t, _ = scene.cast(origins, dirs)

    if table:
        dz = dirs[:, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            t_plane = -origins[:, 2] / dz
        t_plane = np.where((dz != 0) & (t_plane > 0), t_plane, np.inf)
        t = np.minimum(t, t_plane)

    depth = np.where(np.isfinite(t), t, DEPTH_SENTINEL)
    return DepthImage(depth.reshape(camera.height, camera.width))
