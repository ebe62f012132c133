from .descriptors import depth_descriptor, tactile_descriptor, build_descriptor
from .distributions import (PoseDistribution, match_distribution, width_factor,
                            fuse, estimate_pose, Observation)
from .library import GraspLibrary, calibrate_beta

__all__ = [
    "depth_descriptor", "tactile_descriptor", "build_descriptor",
    "PoseDistribution", "match_distribution", "width_factor", "fuse",
    "estimate_pose", "Observation", "GraspLibrary", "calibrate_beta",
]
