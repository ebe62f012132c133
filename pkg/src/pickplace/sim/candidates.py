"""Antipodal grasp candidates from an overhead scene depth image.

From every strided depth-edge pixel, a march along the height gradient
crosses the object; the contiguous high segment of the height profile
gives the two opposing contacts. Candidates whose finger footprints would
land on anything taller than the clearance are rejected. Each candidate
carries its image frame (center pixel, axis angle), a metric width
estimate, and the ingredients of the task-agnostic heuristic score
(gradient opposition at the contacts and the width margin).
"""

from dataclasses import dataclass

import numpy as np

from scipy import ndimage

from ..errors import NoCandidates
from .. import config as _config
from ..render.images import DEPTH_SENTINEL

CandidateConfig = _config.CandidateConfig


@dataclass
class GraspCandidate:
    id: int
    center_px: tuple            # (u, v)
    axis_angle_rad: float       # image-space angle of the closing axis
    width_mm: float
    center_world: np.ndarray    # (3,) at the table plane
    axis_world: np.ndarray      # (3,) unit, horizontal
    opposition: float           # gradient anti-alignment in [0, 1]
    width_margin: float         # (max_opening - width) / max_opening

    def agnostic_score(self):
        return self.opposition * self.width_margin


def _height_map(depth_image, camera):
    depth = depth_image.depth
    h = np.zeros_like(depth)
    valid = depth != DEPTH_SENTINEL
    cam_z = camera.extrinsic.trans[2]
    h[valid] = cam_z - depth[valid]
    return h, valid


def sample_candidates(depth_image, camera, gripper, cfg=None, rng=None):
    """Collision-filtered antipodal candidates on the depth image."""
    cfg = cfg or CandidateConfig()
    height, valid = _height_map(depth_image, camera)
    rows, cols = height.shape
    gy, gx = np.gradient(height)
    gmag = np.hypot(gx, gy)
    edges = (gmag > cfg.depth_edge_mm) & valid
    # Rasterized diagonal edges alias the per-pixel gradient direction;
    # a smoothed field gives the true edge normal for the march axis.
    smooth = ndimage.uniform_filter(height, size=5)
    sgy, sgx = np.gradient(smooth)

    mm_per_px = camera.mm_per_px_at(camera.extrinsic.trans[2])
    max_px = int(np.ceil(gripper.max_opening / mm_per_px)) + 2
    finger_px = max(1, int(round(gripper.finger_thickness / mm_per_px)))
    fw_px = max(1, int(round(gripper.finger_width / mm_per_px / 2)))

    edge_v, edge_u = np.nonzero(edges)
    candidates = []
    for k in range(0, len(edge_u), cfg.stride_px):
        u1, v1 = int(edge_u[k]), int(edge_v[k])
        g1 = np.array([sgx[v1, u1], sgy[v1, u1]])
        n1 = np.linalg.norm(g1)
        if n1 < 1e-9:
            continue
        d = g1 / n1      # uphill: into the object
        seg = _high_segment(height, (u1, v1), d, max_px, cfg.finger_clear_mm)
        if seg is None:
            continue
        s_rise, s_fall = seg
        pa = np.array([u1, v1]) + d * (s_rise - 0.5)
        pb = np.array([u1, v1]) + d * (s_fall + 0.5)
        cu, cv = (pa + pb) / 2.0
        hu = int(round(np.clip(cu, 0, cols - 1)))
        hv = int(round(np.clip(cv, 0, rows - 1)))
        obj_h = float(height[hv, hu])
        scale = camera.mm_per_px_at(camera.extrinsic.trans[2] - obj_h)
        width = float(np.linalg.norm(pb - pa) * scale)
        if width < cfg.min_width_mm or width > gripper.max_opening:
            continue
        if not _fingers_clear(height, pa, pb, d, finger_px, fw_px,
                              cfg.finger_clear_mm):
            continue
        opposition = _opposition(gx, gy, pa, pb, d)
        if opposition < cfg.opposition_min:
            continue
        angle = float(np.arctan2(d[1], d[0]))
        world = camera.unproject(np.array([cu]), np.array([cv]),
                                 np.array([camera.extrinsic.trans[2]]))[0]
        world[2] = 0.0
        paw = camera.unproject(np.array([pa[0]]), np.array([pa[1]]),
                               np.array([camera.extrinsic.trans[2] - obj_h]))[0]
        pbw = camera.unproject(np.array([pb[0]]), np.array([pb[1]]),
                               np.array([camera.extrinsic.trans[2] - obj_h]))[0]
        axis_w = pbw - paw
        axis_w[2] = 0.0
        nw = np.linalg.norm(axis_w)
        if nw < 1e-9:
            continue
        margin = (gripper.max_opening - width) / gripper.max_opening
        candidates.append(GraspCandidate(
            len(candidates), (float(cu), float(cv)), angle, width, world,
            axis_w / nw, opposition, float(np.clip(margin, 0.0, 1.0))))
    if not candidates:
        raise NoCandidates("no antipodal candidates on the depth image")
    if len(candidates) > cfg.max_candidates:
        # Even subsample keeps spatial coverage instead of truncating the
        # raster scan at one side of the object.
        keep = np.linspace(0, len(candidates) - 1, cfg.max_candidates).astype(int)
        candidates = [candidates[i] for i in keep]
        for new_id, c in enumerate(candidates):
            c.id = new_id
    return candidates


def _high_segment(height, start, d, max_px, clear_mm):
    """First contiguous above-clearance run of the height profile along d."""
    rows, cols = height.shape
    u0, v0 = start
    s_rise = None
    for s in range(0, max_px + 1):
        uu = int(round(u0 + d[0] * s))
        vv = int(round(v0 + d[1] * s))
        if not (0 <= uu < cols and 0 <= vv < rows):
            return None
        high = height[vv, uu] > clear_mm
        if s_rise is None:
            if high:
                s_rise = s
        elif not high:
            return (s_rise, s - 1)
    return None   # object wider than the opening (or never dropped)


def _opposition(gx, gy, pa, pb, d):
    """Anti-alignment of the surface gradients at the two contacts."""
    rows, cols = gx.shape

    def grad_at(p):
        u = int(round(np.clip(p[0], 0, cols - 1)))
        v = int(round(np.clip(p[1], 0, rows - 1)))
        return np.array([gx[v, u], gy[v, u]])

    ga = grad_at(pa)
    gb = grad_at(pb)
    na, nb = np.linalg.norm(ga), np.linalg.norm(gb)
    if na < 1e-9 or nb < 1e-9:
        return 0.0
    # ga points along +d (uphill into the object), gb along -d.
    return float(np.clip((ga @ d) / na, 0, 1) * np.clip(-(gb @ d) / nb, 0, 1))


def _fingers_clear(height, pa, pb, d, finger_px, half_w_px, clear_mm,
                   tolerate=0.15):
    """Scene under each finger footprint must stay below the clearance.

    A small fraction of violating samples is tolerated: the marching axis
    drifts a little at corners, and the exact surface probe re-validates
    every executed grasp anyway.
    """
    rows, cols = height.shape
    perp = np.array([-d[1], d[0]])
    lat_reach = max(1, half_w_px - 2)
    checked = 0
    bad = 0
    for p, sign in ((pa, -1.0), (pb, 1.0)):
        for depth_step in range(1, 1 + finger_px):
            for lat in range(-lat_reach, lat_reach + 1, 2):
                uu = int(round(p[0] + sign * d[0] * depth_step + perp[0] * lat))
                vv = int(round(p[1] + sign * d[1] * depth_step + perp[1] * lat))
                if not (0 <= uu < cols and 0 <= vv < rows):
                    return False
                checked += 1
                if height[vv, uu] > clear_mm:
                    bad += 1
    return bad <= tolerate * checked
