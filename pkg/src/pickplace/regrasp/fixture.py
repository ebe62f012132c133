"""Placement fixture: the goal cavity and its collision test.

The fixture is the goal object's footprint extruded as a slab of the
cavity depth, with 1 mm of radial clearance around the object. Fingers
are far thicker than the clearance gap, so any gripper box dipping below
the fixture top collides. Placement is modeled as a hover-and-release at
the fixture top: the object drops by the cavity depth, guided by the
mating chamfer, which is why the depth defaults to the chamfer scale.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from ..geometry.pose import Pose

# Fingers may dip this far below the fixture top at the hover pose; the
# mating chamfer is wider than this, so sub-millimeter dips cannot jam.
PLACE_TOL_MM = 1.0


@dataclass
class PlacementFixture:
    seat_pose: Pose               # object pose seated in the cavity (q_goal)
    cavity_depth_mm: float = 3.0
    radial_clearance_mm: float = 1.0
    footprint: np.ndarray = None  # (K, 2) dilated convex footprint, informational

    @property
    def top_z(self):
        return self.cavity_depth_mm

    @property
    def hover_pose(self):
        """Goal pose raised so the object bottom sits on the fixture top."""
        return Pose.from_translation([0.0, 0.0, self.cavity_depth_mm]).compose(
            self.seat_pose)

    def to_dict(self):
        return {
            "seat_pose": self.seat_pose.to_dict(),
            "cavity_depth_mm": self.cavity_depth_mm,
            "radial_clearance_mm": self.radial_clearance_mm,
            "footprint": None if self.footprint is None
            else [[float(a), float(b)] for a, b in self.footprint],
        }

    @staticmethod
    def from_dict(d):
        fp = d.get("footprint")
        return PlacementFixture(Pose.from_dict(d["seat_pose"]),
                                float(d["cavity_depth_mm"]),
                                float(d["radial_clearance_mm"]),
                                None if fp is None else np.asarray(fp))


def build_fixture(mesh, goal_orientation, cavity_depth_mm=3.0,
                  radial_clearance_mm=1.0):
    """Fixture for placing the object in the given orientation.

    goal_orientation: Pose mapping the object frame to the world with the
    support plane at z=0 (a stable pose works directly). The footprint is
    the projected convex hull dilated by the radial clearance.
    """
    verts = goal_orientation.apply(mesh.vertices)
    xy = verts[:, :2]
    hull = ConvexHull(xy)
    poly = xy[hull.vertices]
    center = poly.mean(axis=0)
    radial = poly - center
    norms = np.linalg.norm(radial, axis=1, keepdims=True)
    dilated = center + radial * (1.0 + radial_clearance_mm / np.maximum(norms, 1e-9))
    return PlacementFixture(goal_orientation, cavity_depth_mm,
                            radial_clearance_mm, dilated)


def place_check(object_in_gripper, width, gripper, fixture):
    """Can the gripper place the object (hover at the fixture top)?

    Returns (ok, quality): ok requires every gripper box to stay above the
    fixture slab; quality is the spare height over 5 mm, clamped to [0, 1].
    """
    grip_world = fixture.hover_pose.compose(object_in_gripper.inverse())
    boxes = gripper.posed_boxes(grip_world, width)
    margin = min(b.min_z() for b in boxes) - fixture.top_z
    ok = margin >= -PLACE_TOL_MM
    quality = float(np.clip(margin / 5.0, 0.0, 1.0)) if ok else 0.0
    return ok, quality
