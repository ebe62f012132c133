"""Parallel-jaw gripper geometry.

Frame convention (see render.contact): origin at the TCP on the fingertip
plane, x along the closing axis, z from fingertips toward the palm. At a
given opening width the finger boxes sit just outside x = +-width/2 and
the palm closes the top.
"""

from dataclasses import dataclass

import numpy as np

from ..collision import Obb


@dataclass(frozen=True)
class GripperModel:
    finger_width: float = 26.0        # y extent of each finger, mm
    finger_thickness: float = 5.0     # x extent of each finger, mm
    finger_length: float = 50.0       # z extent of each finger, mm
    max_opening: float = 32.0
    min_opening: float = 0.0
    palm_size: tuple = (46.0, 34.0, 20.0)   # x, y, z extents, mm
    sensor_plane_size: tuple = (24.0, 18.0)  # active tactile window (w, h), mm

    def __post_init__(self):
        if not self.min_opening < self.max_opening:
            raise ValueError("min_opening must be below max_opening")
        for v in (self.finger_width, self.finger_thickness, self.finger_length,
                  self.max_opening, *self.palm_size, *self.sensor_plane_size):
            if v <= 0:
                raise ValueError("gripper dimensions must be positive")

    def boxes(self, width):
        """The three collision boxes (finger A, finger B, palm) in the
        gripper frame at the given opening width."""
        ft, fw, fl = self.finger_thickness, self.finger_width, self.finger_length
        half_f = np.array([ft / 2.0, fw / 2.0, fl / 2.0])
        xa = width / 2.0 + ft / 2.0
        finger_a = Obb(np.array([xa, 0.0, fl / 2.0]), np.eye(3), half_f)
        finger_b = Obb(np.array([-xa, 0.0, fl / 2.0]), np.eye(3), half_f)
        px, py, pz = self.palm_size
        palm = Obb(np.array([0.0, 0.0, fl + pz / 2.0]), np.eye(3),
                   np.array([px / 2.0, py / 2.0, pz / 2.0]))
        return [finger_a, finger_b, palm]

    def posed_boxes(self, gripper_pose, width):
        return [b.transformed(gripper_pose) for b in self.boxes(width)]

    def to_dict(self):
        return {
            "finger_width": self.finger_width,
            "finger_thickness": self.finger_thickness,
            "finger_length": self.finger_length,
            "max_opening": self.max_opening,
            "min_opening": self.min_opening,
            "palm_size": list(self.palm_size),
            "sensor_plane_size": list(self.sensor_plane_size),
        }

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d["palm_size"] = tuple(d["palm_size"])
        d["sensor_plane_size"] = tuple(d["sensor_plane_size"])
        return GripperModel(**d)
