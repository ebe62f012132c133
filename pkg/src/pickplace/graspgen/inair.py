"""In-air grasp sampling by pairing antipodal surface patches.

The surface is bucketed into small patches (centroid + mean normal); a
patch pair becomes a grasp when the normals are antipodal within
tolerance, the connecting segment lies inside both friction cones, and
the gripper boxes clear the object. Each pair is swept over a set of roll
angles about the closing axis, then the set is capped by farthest-point
subsampling in pose space.
"""

from dataclasses import dataclass

import numpy as np

from ..collision import pack_boxes
from ..errors import NoGraspsFound
from ..geometry.pose import Pose
from .. import kernels
from .probe import probe_grasp, surface_samples


@dataclass
class InAirGrasp:
    id: int
    object_in_gripper: Pose
    width: float
    contact_a: np.ndarray     # (2, 3): point, normal in the object frame
    contact_b: np.ndarray

    def to_dict(self):
        return {
            "id": self.id,
            "object_in_gripper": self.object_in_gripper.to_dict(),
            "width": float(self.width),
            "contact_a": [[float(x) for x in row] for row in self.contact_a],
            "contact_b": [[float(x) for x in row] for row in self.contact_b],
        }

    @staticmethod
    def from_dict(d):
        return InAirGrasp(int(d["id"]), Pose.from_dict(d["object_in_gripper"]),
                          float(d["width"]),
                          np.asarray(d["contact_a"], dtype=np.float64),
                          np.asarray(d["contact_b"], dtype=np.float64))


@dataclass
class InAirConfig:
    patch_mm: float = 5.0
    antipodal_tol_deg: float = 10.0
    friction: float = 0.5
    rolls_deg: tuple = (0.0, 90.0, 180.0, 270.0)
    max_grasps: int = 500
    surface_samples: int = 20000
    seed: int = 0
    width_consistency_mm: float = 1.5

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.__dict__.items()}

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d["rolls_deg"] = tuple(d["rolls_deg"])
        return InAirConfig(**d)


def _patches(points, normals, patch_mm):
    """Bucket surface samples into grid cells split by quantized normal."""
    cells = np.floor(points / patch_mm).astype(np.int64)
    ndir = np.round(normals * 2.0).astype(np.int64)   # 26-neighborhood quantization
    keys = {}
    for i in range(len(points)):
        k = (cells[i, 0], cells[i, 1], cells[i, 2], ndir[i, 0], ndir[i, 1], ndir[i, 2])
        keys.setdefault(k, []).append(i)
    cents, norms = [], []
    for k in sorted(keys):
        idx = keys[k]
        if len(idx) < 3:
            continue
        c = points[idx].mean(axis=0)
        n = normals[idx].mean(axis=0)
        ln = np.linalg.norm(n)
        if ln < 0.5:   # incoherent normals within the bucket
            continue
        cents.append(c)
        norms.append(n / ln)
    return np.asarray(cents), np.asarray(norms)


def grasp_frame(contact_a, contact_b, roll_rad, sensor_h):
    """Gripper pose (in the object frame) closing on the two contact points,
    sensor window centered on the contact line."""
    d = contact_a - contact_b
    width = np.linalg.norm(d)
    x = d / width
    ref = np.array([0.0, 0.0, 1.0])
    if abs(float(x @ ref)) > 0.99:
        ref = np.array([0.0, 1.0, 0.0])
    y0 = np.cross(ref, x)
    y0 /= np.linalg.norm(y0)
    z0 = np.cross(x, y0)
    cr, sr = np.cos(roll_rad), np.sin(roll_rad)
    y = cr * y0 + sr * z0
    z = np.cross(x, y)
    mid = (contact_a + contact_b) / 2.0
    trans = mid - z * (sensor_h / 2.0)
    m = np.eye(4)
    m[:3, 0] = x
    m[:3, 1] = y
    m[:3, 2] = z
    m[:3, 3] = trans
    return Pose.from_matrix(m), float(width)


def pose_spread_metric(pose_a, pose_b, length_scale):
    return (float(np.linalg.norm(pose_a.trans - pose_b.trans))
            + np.deg2rad(pose_a.angle_to_deg(pose_b)) * length_scale)


def sample_in_air_grasps(mesh, gripper, cfg=None):
    cfg = cfg or InAirConfig()
    points, normals = surface_samples(mesh, cfg.surface_samples, cfg.seed)
    cents, norms = _patches(points, normals, cfg.patch_mm)
    if len(cents) < 2:
        raise NoGraspsFound("not enough surface patches")

    cone = np.arctan(cfg.friction)
    tol = np.deg2rad(cfg.antipodal_tol_deg)
    sensor_h = gripper.sensor_plane_size[1]

    candidates = []
    npatch = len(cents)
    for i in range(npatch):
        for j in range(i + 1, npatch):
            d = cents[i] - cents[j]
            dist = np.linalg.norm(d)
            if dist < max(gripper.min_opening, 1e-6) or dist > gripper.max_opening:
                continue
            dn = d / dist
            if np.arccos(np.clip(-norms[i] @ norms[j], -1, 1)) > tol:
                continue
            # Segment inside both friction cones (force along the closing line).
            if np.arccos(np.clip(norms[i] @ dn, -1, 1)) > cone:
                continue
            if np.arccos(np.clip(norms[j] @ -dn, -1, 1)) > cone:
                continue
            for roll in cfg.rolls_deg:
                grip_in_obj, width = grasp_frame(cents[i], cents[j],
                                                 np.deg2rad(roll), sensor_h)
                inv = grip_in_obj.inverse()
                res = probe_grasp(inv.apply(points), inv.rotate(normals), gripper,
                                  friction=cfg.friction,
                                  antipodal_tol_deg=cfg.antipodal_tol_deg)
                if not res.ok:
                    continue
                if abs(res.width - width) > cfg.width_consistency_mm:
                    continue   # something wider sits inside the finger slab
                grip_in_obj = grip_in_obj.compose(
                    Pose.from_translation([res.x_center, 0.0, 0.0]))
                candidates.append((grip_in_obj, res))

    if not candidates:
        raise NoGraspsFound("no antipodal patch pairs fit the gripper")

    # Batched collision filter in the object frame.
    boxes = []
    for grip, res in candidates:
        boxes.extend(gripper.posed_boxes(grip, res.width + 0.02))
    centers, axes, half = pack_boxes(boxes)
    hits = kernels.boxes_hit_mesh(centers, axes, half, mesh.vertices, mesh.triangles)
    free = ~hits.reshape(-1, 3).any(axis=1)
    candidates = [c for c, ok in zip(candidates, free) if ok]
    if not candidates:
        raise NoGraspsFound("all candidate grasps collide with the object")

    poses = [grip.inverse() for grip, _ in candidates]   # object in gripper
    if cfg.max_grasps and len(candidates) > cfg.max_grasps:
        keep_idx = _farthest_point_subset(poses, cfg.max_grasps, mesh)
    else:
        keep_idx = list(range(len(candidates)))

    out = []
    for gid, ci in enumerate(keep_idx):
        grip, res = candidates[ci]
        contact_a = np.stack([grip.apply(res.contact_a[0]),
                              grip.rotate(res.contact_a[1])])
        contact_b = np.stack([grip.apply(res.contact_b[0]),
                              grip.rotate(res.contact_b[1])])
        out.append(InAirGrasp(gid, poses[ci], res.width, contact_a, contact_b))
    return out


def _farthest_point_subset(poses, k, mesh):
    scale = float(np.linalg.norm(mesh.vertices - mesh.com, axis=1).mean())
    n = len(poses)
    trans = np.stack([p.trans for p in poses])
    quats = np.stack([p.quat for p in poses])
    dist_t = np.linalg.norm(trans[:, None, :] - trans[None, :, :], axis=2)
    dots = np.clip(np.abs(quats @ quats.T), -1.0, 1.0)
    dist_r = 2.0 * np.arccos(dots) * scale
    dmat = dist_t + dist_r
    chosen = [0]
    mind = dmat[0].copy()
    for _ in range(1, k):
        nxt = int(np.argmax(mind))
        chosen.append(nxt)
        mind = np.minimum(mind, dmat[nxt])
    return sorted(chosen)
