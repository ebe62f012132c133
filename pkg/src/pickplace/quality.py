"""Task-aware grasp quality: graspability x observability x manipulability.

Graspability is the normalized contact-patch area, observability a binary
self-identification test on the grasp's own simulated observations, and
manipulability a decreasing function of the regrasp count needed to reach
the goal. The composite is smoothed over neighboring grasps so adjacent
table grasps score consistently.
"""

from dataclasses import dataclass

import numpy as np

from .perception.distributions import Observation, estimate_pose

MANIPULABILITY_TABLE = {0: 1.0, 1: 0.8, 2: 0.4}


@dataclass
class QualityConfig:
    observe_argmax_mm: float = 5.0     # argmax must land within this ADD of t
    observe_top_k: int = 5
    observe_spread_mm: float = 2.0     # max pairwise ADD among the top k
    spread_rule: str = "max"           # or "mean"
    smooth_angle_deg: float = 5.0
    smooth_xy_mm: float = 10.0
    width_sigma_mm: float = 1.0

    def to_dict(self):
        return dict(self.__dict__)

    @staticmethod
    def from_dict(d):
        return QualityConfig(**d)


def graspability(contact_mask):
    """Fraction of the two sensor windows in contact, clamped to [0, 1]."""
    total = contact_mask.mask_a.size + contact_mask.mask_b.size
    on = int(contact_mask.mask_a.sum()) + int(contact_mask.mask_b.sum())
    return float(np.clip(on / total, 0.0, 1.0))


def observability(index, library, cfg=None):
    """1 when the grasp's own noiseless observations identify it.

    The fused self-posterior must put its argmax within 5 mm ADD of the
    grasp, and the top-5 most likely grasps must deviate by at most 2 mm
    from one another.
    """
    cfg = cfg or QualityConfig()
    obs = Observation(depth_descriptor=library.depth_descriptors[index],
                      tactile_descriptor=library.tactile_descriptors[index],
                      gripper_width=float(library.widths[index]))
    est = estimate_pose(obs, library, width_sigma=cfg.width_sigma_mm)
    if library.add_between(est.best_index, index) > cfg.observe_argmax_mm:
        return 0
    top = est.distribution.top_k(cfg.observe_top_k)
    spread = _pairwise_add_spread(library, top, cfg.spread_rule)
    return 1 if spread <= cfg.observe_spread_mm else 0


def _pairwise_add_spread(library, indices, rule):
    if len(indices) < 2:
        return 0.0
    vals = []
    for a in range(len(indices)):
        for b in range(a + 1, len(indices)):
            vals.append(library.add_between(int(indices[a]), int(indices[b])))
    return float(np.max(vals) if rule == "max" else np.mean(vals))


def manipulability(handoff_count):
    """Map a minimal regrasp count (None = no plan) to the quality factor."""
    if handoff_count is None or handoff_count < 0:
        return 0.0
    return MANIPULABILITY_TABLE.get(int(handoff_count), 0.0)


def composite_scores(graspability_v, observability_v, manipulability_v):
    g = np.asarray(graspability_v, dtype=np.float64)
    o = np.asarray(observability_v, dtype=np.float64)
    m = np.asarray(manipulability_v, dtype=np.float64)
    return g * o * m


def smooth_scores(scores, grasps, cfg=None):
    """min(score, median(neighbor scores), mean(neighbor scores)) per grasp.

    Neighbors are grasps whose relative orientation is under the angle
    threshold and whose grasp centers lie within the x/y window in the
    table frame. Grasps without neighbors keep their score.
    """
    cfg = cfg or QualityConfig()
    scores = np.asarray(scores, dtype=np.float64)
    n = len(grasps)
    quats = np.stack([g.object_in_gripper.quat for g in grasps])
    centers = np.stack([g.gripper_in_table.trans[:2] for g in grasps])
    sources = np.array([g.source_stable_pose for g in grasps])

    dots = np.clip(np.abs(quats @ quats.T), -1.0, 1.0)
    ang = np.degrees(2.0 * np.arccos(dots))
    dxy = np.abs(centers[:, None, :] - centers[None, :, :])
    neighbors = (ang < cfg.smooth_angle_deg) \
        & (dxy[:, :, 0] < cfg.smooth_xy_mm) & (dxy[:, :, 1] < cfg.smooth_xy_mm) \
        & (sources[:, None] == sources[None, :])
    np.fill_diagonal(neighbors, False)

    out = scores.copy()
    for i in range(n):
        nb = scores[neighbors[i]]
        if len(nb) == 0:
            continue
        out[i] = min(scores[i], float(np.median(nb)), float(np.mean(nb)))
    return out


def expected_quality(smoothed_scores, vision_distribution):
    """E[q | d]: the vision-weighted average of precomputed grasp quality."""
    s = np.asarray(smoothed_scores, dtype=np.float64)
    p = vision_distribution.probs
    if len(s) != len(p):
        raise ValueError("score vector and distribution sizes differ")
    return float(s @ p)
