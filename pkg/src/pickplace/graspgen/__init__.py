from .gripper import GripperModel
from .table import TableGrasp, sample_table_grasps, augment_table_grasps
from .inair import InAirGrasp, sample_in_air_grasps

__all__ = [
    "GripperModel", "TableGrasp", "sample_table_grasps",
    "augment_table_grasps", "InAirGrasp", "sample_in_air_grasps",
]
