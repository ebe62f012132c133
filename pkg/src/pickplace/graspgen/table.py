"""Table grasp sampling: antipodal grasps reachable from each resting pose.

Grasp centers lie on a translational grid (default 1 mm) swept over a yaw
grid around the object, with the fingertip plane kept flush with the table
(a small standoff keeps the fingers just clear of it). Each surviving
grasp is collision-checked as three oriented boxes against the mesh.
Augmentation perturbs the object in the hand (tilt about the closing axis
and a vertical gripper offset) and re-runs the same filters.
"""

from dataclasses import dataclass

import numpy as np

from ..collision import pack_boxes
from ..errors import NoGraspsFound
from ..geometry.pose import Pose
from .. import kernels
from .probe import probe_grasp, surface_samples


@dataclass
class TableGrasp:
    id: int
    object_in_gripper: Pose
    width: float
    source_stable_pose: int
    perturbation: tuple            # (axis angle deg, height offset mm)
    gripper_in_table: Pose         # gripper pose with the object at its
                                   # canonical resting position

    def to_dict(self):
        return {
            "id": self.id,
            "object_in_gripper": self.object_in_gripper.to_dict(),
            "width": float(self.width),
            "source_stable_pose": int(self.source_stable_pose),
            "perturbation": [float(self.perturbation[0]), float(self.perturbation[1])],
            "gripper_in_table": self.gripper_in_table.to_dict(),
        }

    @staticmethod
    def from_dict(d):
        return TableGrasp(
            id=int(d["id"]),
            object_in_gripper=Pose.from_dict(d["object_in_gripper"]),
            width=float(d["width"]),
            source_stable_pose=int(d["source_stable_pose"]),
            perturbation=tuple(d["perturbation"]),
            gripper_in_table=Pose.from_dict(d["gripper_in_table"]),
        )


@dataclass
class TableSamplingConfig:
    grid_mm: float = 1.0
    yaw_step_deg: float = 10.0
    friction: float = 0.5
    antipodal_tol_deg: float = 10.0
    standoff_mm: float = 1.0
    surface_samples: int = 20000
    seed: int = 0
    max_per_stable: int = 0        # 0 = unlimited
    max_total: int = 5000
    stable_indices: tuple = ()     # empty = all stable poses

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.__dict__.items()}

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d["stable_indices"] = tuple(d.get("stable_indices", ()))
        return TableSamplingConfig(**d)


def _yaw_frame(yaw_rad):
    u = np.array([np.cos(yaw_rad), np.sin(yaw_rad), 0.0])
    y = np.array([-u[1], u[0], 0.0])   # z cross x
    r = np.column_stack([u, y, np.array([0.0, 0.0, 1.0])])
    return u, y, r


def gripper_pose_on_table(center_xy, yaw_rad, standoff_mm):
    """Gripper pose for a top-down table grasp: x = closing axis at the
    given yaw, z up, fingertip plane at the standoff height."""
    u, _, r = _yaw_frame(yaw_rad)
    trans = np.array([center_xy[0], center_xy[1], standoff_mm])
    return Pose.from_matrix(np.block([[r, trans[:, None]], [np.zeros(3), 1.0]]))


def _collision_free(mesh, grips_in_object, widths, gripper):
    """Batched gripper-box vs mesh test in the object frame."""
    boxes = []
    for pose, width in zip(grips_in_object, widths):
        boxes.extend(gripper.posed_boxes(pose, width + 0.02))
    if not boxes:
        return np.zeros(0, dtype=bool)
    centers, axes, half = pack_boxes(boxes)
    hits = kernels.boxes_hit_mesh(centers, axes, half, mesh.vertices, mesh.triangles)
    return ~hits.reshape(-1, 3).any(axis=1)


def sample_table_grasps(mesh, stable_poses, gripper, cfg=None):
    """Sample the discrete table-grasp set for every resting pose."""
    if not stable_poses:
        raise NoGraspsFound("no stable poses supplied")
    cfg = cfg or TableSamplingConfig()
    pts_obj, nrm_obj = surface_samples(mesh, cfg.surface_samples, cfg.seed)

    indices = cfg.stable_indices or range(len(stable_poses))
    yaw_grid = np.deg2rad(np.arange(0.0, 360.0, cfg.yaw_step_deg))
    grasps = []
    for si in indices:
        sp = stable_poses[si]
        pts_w = sp.pose.apply(pts_obj)
        nrm_w = sp.pose.rotate(nrm_obj)
        candidates = []
        for yaw in yaw_grid:
            u, _, r = _yaw_frame(yaw)
            pu = pts_w @ u
            pv = pts_w @ np.array([-u[1], u[0], 0.0])
            lo = np.floor(pv.min() / cfg.grid_mm) * cfg.grid_mm
            hi = np.ceil(pv.max() / cfg.grid_mm) * cfg.grid_mm
            order = np.argsort(pv, kind="stable")
            pv_sorted = pv[order]
            for gv in np.arange(lo, hi + cfg.grid_mm / 2, cfg.grid_mm):
                a = np.searchsorted(pv_sorted, gv - gripper.finger_width / 2.0)
                b = np.searchsorted(pv_sorted, gv + gripper.finger_width / 2.0)
                if b - a < 8:
                    continue
                sel = order[a:b]
                # Gripper frame with a yet-unknown x center: probe with the
                # slab centered at pu=0, then recenter.
                uc = 0.5 * (pu[sel].max() + pu[sel].min())
                center_xy = uc * u[:2] + gv * np.array([-u[1], u[0]])
                grip = gripper_pose_on_table(center_xy, yaw, cfg.standoff_mm)
                inv = grip.inverse()
                local_pts = inv.apply(pts_w[sel])
                local_nrm = inv.rotate(nrm_w[sel])
                res = probe_grasp(local_pts, local_nrm, gripper,
                                  friction=cfg.friction,
                                  antipodal_tol_deg=cfg.antipodal_tol_deg)
                if not res.ok:
                    continue
                # Recenter the TCP on the contact midplane (pure x shift).
                grip = grip.compose(Pose.from_translation([res.x_center, 0.0, 0.0]))
                candidates.append((si, grip, res.width))
        if not candidates:
            continue
        grips_obj = [sp.pose.inverse().compose(g) for _, g, _ in candidates]
        keep = _collision_free(mesh, grips_obj, [w for _, _, w in candidates], gripper)
        kept = [c for c, k in zip(candidates, keep) if k]
        if cfg.max_per_stable and len(kept) > cfg.max_per_stable:
            stride_idx = np.linspace(0, len(kept) - 1, cfg.max_per_stable).astype(int)
            kept = [kept[i] for i in stride_idx]
        grasps.extend(kept)

    if not grasps:
        raise NoGraspsFound("no collision-free antipodal table grasps")
    if cfg.max_total and len(grasps) > cfg.max_total:
        stride_idx = np.linspace(0, len(grasps) - 1, cfg.max_total).astype(int)
        grasps = [grasps[i] for i in stride_idx]

    out = []
    for gid, (si, grip, width) in enumerate(grasps):
        obj_in_grip = grip.inverse().compose(stable_poses[si].pose)
        out.append(TableGrasp(gid, obj_in_grip, width, si, (0.0, 0.0), grip))
    return out


@dataclass
class PerturbationConfig:
    angles_deg: tuple = (-5.0, 0.0, 5.0)
    heights_mm: tuple = (-1.0, 0.0, 1.0)
    probe_samples: int = 4096

    def to_dict(self):
        return {"angles_deg": list(self.angles_deg),
                "heights_mm": list(self.heights_mm),
                "probe_samples": self.probe_samples}

    @staticmethod
    def from_dict(d):
        return PerturbationConfig(tuple(d["angles_deg"]), tuple(d["heights_mm"]),
                                  int(d.get("probe_samples", 4096)))


def augment_table_grasps(grasps, mesh, stable_poses, gripper, cfg=None):
    """Cross-product of in-hand perturbations, re-filtered.

    The object tilts about the closing axis through the sensor-window
    center, re-seats on the table, and the gripper takes a vertical
    offset. Variants that lose contact, exceed the opening, collide, or
    sink below the table are dropped. Ids are renumbered sequentially.
    """
    cfg = cfg or PerturbationConfig()
    combos = [(a, h) for a in cfg.angles_deg for h in cfg.heights_mm]
    if combos == [(0.0, 0.0)]:
        return list(grasps)
    pts_obj, nrm_obj = surface_samples(mesh, cfg.probe_samples, seed=1)

    survivors = []
    pending_boxes = []
    for g in grasps:
        obj_w = g.gripper_in_table.compose(g.object_in_gripper)
        grip = g.gripper_in_table
        axis_w = grip.rotate(np.array([1.0, 0.0, 0.0]))
        pivot = grip.apply(np.array([0.0, 0.0, gripper.sensor_plane_size[1] / 2.0]))
        for angle_deg, dz in combos:
            if angle_deg == 0.0:
                obj_p = obj_w
            else:
                tilt = Pose.from_axis_angle(axis_w, np.deg2rad(angle_deg))
                obj_p = Pose.from_translation(pivot).compose(tilt).compose(
                    Pose.from_translation(-pivot)).compose(obj_w)
                # Re-seat: the object pivots on the table, not through it.
                zmin = obj_p.apply(mesh.vertices)[:, 2].min()
                if abs(zmin) > 1e-9:
                    obj_p = Pose.from_translation([0.0, 0.0, -zmin]).compose(obj_p)
            grip_p = Pose.from_translation([0.0, 0.0, dz]).compose(grip)
            if grip_p.trans[2] < -1e-9:
                continue
            inv = grip_p.inverse()
            rel = inv.compose(obj_p)            # object in gripper
            local_pts = rel.apply(pts_obj)
            local_nrm = rel.rotate(nrm_obj)
            res = probe_grasp(local_pts, local_nrm, gripper)
            if not res.ok:
                continue
            pending_boxes.append((g.source_stable_pose, rel, res.width, grip_p,
                                  (angle_deg, dz)))

    if pending_boxes:
        grips_obj = [rel.inverse() for _, rel, _, _, _ in pending_boxes]
        keep = _collision_free(mesh, grips_obj,
                               [w for _, _, w, _, _ in pending_boxes], gripper)
        survivors = [p for p, k in zip(pending_boxes, keep) if k]

    out = []
    for gid, (si, rel, width, grip_p, pert) in enumerate(survivors):
        out.append(TableGrasp(gid, rel, width, si, pert, grip_p))
    return out
