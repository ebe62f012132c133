from .pose import Pose
from .mesh import TriMesh, load_mesh
from .pointcloud import PointCloud, sample_point_cloud, add_distance
from .stable import StablePose, compute_stable_poses

__all__ = [
    "Pose",
    "TriMesh",
    "load_mesh",
    "PointCloud",
    "sample_point_cloud",
    "add_distance",
    "StablePose",
    "compute_stable_poses",
]
