"""Ray-cast scene wrapper: BVH construction plus kernel dispatch."""

import numpy as np

from .. import kernels


class RayScene:
    """Immutable mesh + BVH pair, shareable across renders."""

    def __init__(self, mesh):
        self.mesh = mesh
        self._bvh = kernels.build_bvh(mesh.vertices, mesh.triangles)

    def cast(self, origins, dirs):
        origins = np.ascontiguousarray(origins, dtype=np.float64)
        dirs = np.ascontiguousarray(dirs, dtype=np.float64)
        return kernels.cast_rays(origins, dirs, self.mesh.vertices,
                                 self.mesh.triangles, *self._bvh)
