"""One simulated pick-and-place episode with ground truth.

The four stages mirror the deployed pipeline: grasp selection on the
scene depth image, execution with seeded in-hand perturbation plus
tactile observation, pose estimation with the method's modality set, and
regrasp planning followed by an open-loop placement whose error is the
mismatch between the estimated and true grasp (composed with per-handoff
noise). Every episode is a pure function of (config, seed).
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyContact, NoCandidates
from ..geometry.pose import Pose
from ..geometry.pointcloud import add_distance
from ..graspgen.probe import probe_grasp, surface_samples
from ..graspgen.table import gripper_pose_on_table
from ..perception.descriptors import depth_descriptor, tactile_descriptor
from ..perception.distributions import Observation, estimate_pose
from ..quality import expected_quality, graspability
from ..regrasp.graph import build_graph, shortest_path
from ..render.contact import contact_pair
from ..render.crop import grasp_crop
from ..render.depth import render_depth
from ..render.images import ContactMask
from ..render.noise import add_depth_noise, add_mask_noise
from ..render.raycast import RayScene
from .candidates import sample_candidates

METHODS = ("simple", "agnostic", "tactile_only", "vision_only")


@dataclass
class EpisodeRecord:
    seed: int
    method: str
    true_pose: Pose = None
    true_grasp_pose: Pose = None          # executed object-in-gripper
    true_grasp_id: int = -1               # nearest library element
    candidate_count: int = 0
    candidates: list = field(default_factory=list)   # per-candidate summaries
    chosen_candidate: int = -1
    chosen_grasp_id: int = -1             # estimated library element
    vision_summary: dict = field(default_factory=dict)
    fused_summary: dict = field(default_factory=dict)
    plan: object = None
    regrasps: int = -1
    trans_err_mm: float = float("nan")
    rot_err_deg: float = float("nan")
    outcome: str = "Failure"
    failure_kind: str = ""
    localization_ok: bool = False
    grasp_held: bool = False
    plan_found: bool = False

    def to_dict(self):
        return {
            "seed": self.seed,
            "method": self.method,
            "true_pose": None if self.true_pose is None else self.true_pose.to_dict(),
            "true_grasp_pose": (None if self.true_grasp_pose is None
                                else self.true_grasp_pose.to_dict()),
            "true_grasp_id": self.true_grasp_id,
            "candidate_count": self.candidate_count,
            "candidates": self.candidates,
            "chosen_candidate": self.chosen_candidate,
            "chosen_grasp_id": self.chosen_grasp_id,
            "vision_summary": self.vision_summary,
            "fused_summary": self.fused_summary,
            "plan": None if self.plan is None else self.plan.to_dict(),
            "regrasps": self.regrasps,
            "trans_err_mm": self.trans_err_mm,
            "rot_err_deg": self.rot_err_deg,
            "outcome": self.outcome,
            "failure_kind": self.failure_kind,
            "localization_ok": self.localization_ok,
            "grasp_held": self.grasp_held,
            "plan_found": self.plan_found,
        }


def classify_outcome(trans_err_mm, rot_err_deg, localization_ok, plan_found,
                     grasp_held, sim_cfg):
    """Map stage flags and terminal error to the outcome taxonomy."""
    if not grasp_held:
        return "Failure", "grasp"
    if not localization_ok:
        return "Failure", "localization"
    if not plan_found:
        return "Failure", "planning"
    if (trans_err_mm <= sim_cfg.success_trans_mm
            and rot_err_deg <= sim_cfg.success_rot_deg):
        return "Success", ""
    if sim_cfg.success_trans_mm < trans_err_mm <= sim_cfg.near_success_mm:
        return "NearSuccess", ""
    return "Failure", "localization"


def _dist_summary(dist):
    top = dist.top_k(5)
    return {"argmax": int(dist.argmax()),
            "entropy": round(dist.entropy(), 6),
            "top5": [[int(i), round(float(dist.probs[i]), 6)] for i in top]}


def _small_rigid(rng, sigma_mm, sigma_deg):
    if sigma_mm == 0.0 and sigma_deg == 0.0:
        return Pose.identity()
    trans = np.array([rng.normal(0, sigma_mm), rng.normal(0, sigma_mm), 0.0])
    yaw = np.deg2rad(rng.normal(0, sigma_deg))
    return Pose.from_axis_angle([0.0, 0.0, 1.0], yaw, trans=trans)


def spawn_pose(runtime, rng):
    cfg = runtime.config.sim
    if cfg.spawn_stable_index >= 0:
        si = cfg.spawn_stable_index
    else:
        weights = np.array([sp.probability_weight for sp in runtime.stable_poses])
        si = int(rng.choice(len(weights), p=weights / weights.sum()))
    x, y = rng.uniform(-cfg.spawn_xy_mm, cfg.spawn_xy_mm, 2)
    yaw = rng.uniform(0.0, 2 * np.pi)
    shift = Pose.from_axis_angle([0, 0, 1], yaw, trans=[x, y, 0.0])
    return shift.compose(runtime.stable_poses[si].pose)


def _fail(record, kind, sim_cfg):
    record.outcome, record.failure_kind = classify_outcome(
        np.nan, np.nan, record.localization_ok, record.plan_found,
        record.grasp_held, sim_cfg)
    if record.failure_kind == "":
        record.outcome, record.failure_kind = "Failure", kind
    return record


def run_episode(runtime, method, seed):
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'; choices: {METHODS}")
    cfg = runtime.config
    sim = cfg.sim
    seq = np.random.SeedSequence([int(seed), 0xC0FFEE])
    rng_spawn, rng_scene, rng_grasp, rng_mask, rng_plan = (
        np.random.Generator(np.random.Philox(s)) for s in seq.spawn(5))

    record = EpisodeRecord(seed=seed, method=method)
    library = runtime.library
    smoothed = library.scores.get("smoothed")

    # 1. Scene and candidate selection.
    true_pose = spawn_pose(runtime, rng_spawn)
    record.true_pose = true_pose
    posed_scene = RayScene(runtime.mesh.transformed(true_pose))
    scene_img = render_depth(runtime.mesh, true_pose, runtime.camera,
                             table=True, scene=posed_scene)
    scene_img = add_depth_noise(scene_img, sim.noise,
                                seed=rng_scene.integers(2 ** 31))
    try:
        candidates = sample_candidates(scene_img, runtime.camera, cfg.gripper,
                                       sim.candidates)
    except NoCandidates:
        return _fail(record, "grasp", sim)
    # Feasibility filter, as the deployed sampler would apply: candidates
    # whose closing geometry cannot produce a valid antipodal grasp are
    # dropped before scoring.
    grips = [_execute_grasp(runtime, true_pose, cand, cfg)
             for cand in candidates]
    keep = [i for i, g in enumerate(grips) if g is not None]
    if not keep:
        return _fail(record, "grasp", sim)
    candidates = [candidates[i] for i in keep]
    grips = [grips[i] for i in keep]
    record.candidate_count = len(candidates)
    record.candidates = [
        {"center_px": [round(c.center_px[0], 2), round(c.center_px[1], 2)],
         "axis_angle_rad": round(c.axis_angle_rad, 4),
         "width_mm": round(c.width_mm, 3)} for c in candidates]

    vision_dists = []
    for cand in candidates:
        crop = grasp_crop(scene_img, cand.center_px, cand.axis_angle_rad,
                          cfg.render.crop_px)
        desc = depth_descriptor(crop)
        obs = Observation(depth_descriptor=desc)
        vision_dists.append(estimate_pose(obs, library).distribution)

    if method == "agnostic":
        scores = [cand.agnostic_score() for cand in candidates]
    else:
        scores = [expected_quality(smoothed, d) for d in vision_dists]
    chosen_idx = int(np.argmax(scores))
    chosen = candidates[chosen_idx]
    vision_dist = vision_dists[chosen_idx]
    record.chosen_candidate = chosen_idx
    record.vision_summary = _dist_summary(vision_dist)

    # 2. Execute the grasp: the jaws settle on the true contacts, then the
    # object shifts in hand by the seeded perturbation.
    grip = grips[chosen_idx]
    true_rel = grip.inverse().compose(true_pose)
    perturb = _small_rigid(rng_grasp, sim.perturb_sigma_mm, sim.perturb_sigma_deg)
    true_rel = perturb.compose(true_rel)
    record.true_grasp_pose = true_rel
    try:
        mask_a, mask_b, width = contact_pair(
            runtime.mesh, true_rel, cfg.gripper, scene=runtime.scene,
            penetration_mm=cfg.render.penetration_mm,
            mm_per_px=cfg.render.sensor_mm_per_px)
    except EmptyContact:
        return _fail(record, "grasp", sim)
    record.grasp_held = graspability(ContactMask(mask_a, mask_b)) \
        >= sim.held_min_graspability
    record.true_grasp_id = library.nearest_index_to(true_rel)
    if not record.grasp_held:
        return _fail(record, "grasp", sim)

    mask_a = add_mask_noise(mask_a, sim.noise, seed=rng_mask.integers(2 ** 31))
    mask_b = add_mask_noise(mask_b, sim.noise, seed=rng_mask.integers(2 ** 31))

    # 3. Pose estimate with the method's modality set: the vision-only
    # baseline never touches the tactile images, the tactile-only baseline
    # never touches the depth crop.
    if method == "vision_only":
        obs = Observation(depth_descriptor=depth_descriptor(
            grasp_crop(scene_img, chosen.center_px, chosen.axis_angle_rad,
                       cfg.render.crop_px)))
    elif method == "tactile_only":
        obs = Observation(
            tactile_descriptor=tactile_descriptor(
                mask_a, mask_b, cfg.render.sensor_mm_per_px,
                cfg.perception.edt_clip_px),
            gripper_width=width)
    else:
        obs = Observation(
            depth_descriptor=depth_descriptor(
                grasp_crop(scene_img, chosen.center_px, chosen.axis_angle_rad,
                           cfg.render.crop_px)),
            tactile_descriptor=tactile_descriptor(
                mask_a, mask_b, cfg.render.sensor_mm_per_px,
                cfg.perception.edt_clip_px),
            gripper_width=width)
    est = estimate_pose(obs, library, width_sigma=cfg.perception.width_sigma_mm)
    record.fused_summary = _dist_summary(est.distribution)
    record.chosen_grasp_id = est.best_index
    est_rel = est.best_grasp.object_in_gripper
    record.localization_ok = add_distance(library.cloud, est_rel, true_rel) \
        <= sim.localization_add_mm

    # 4. Plan and place.
    start_grasp = library.grasps[est.best_index]
    graph = build_graph(start_grasp, runtime.in_air, runtime.edge_cache,
                        cfg.gripper, runtime.fixture,
                        place_ok=runtime.place_ok,
                        place_quality=runtime.place_quality)
    plan = shortest_path(graph)
    record.plan_found = plan is not None
    if plan is not None:
        record.plan = plan
        record.regrasps = plan.regrasp_count
        err = est_rel.inverse().compose(true_rel)
        for _ in range(plan.regrasp_count):
            err = err.compose(_small_rigid(rng_plan, sim.handoff_sigma_mm,
                                           sim.handoff_sigma_deg))
        record.trans_err_mm = float(np.linalg.norm(err.trans))
        record.rot_err_deg = float(err.rotation_angle_deg())

    record.outcome, record.failure_kind = classify_outcome(
        record.trans_err_mm, record.rot_err_deg, record.localization_ok,
        record.plan_found, record.grasp_held, sim)
    return record


def _execute_grasp(runtime, true_pose, candidate, cfg):
    """Settle the commanded candidate onto the object's true contacts.

    Parallel jaws align flush with the contact faces as they close, so the
    executed closing axis comes from the probed contact normals rather
    than the pixelated candidate axis.
    """
    yaw = float(np.arctan2(candidate.axis_world[1], candidate.axis_world[0]))
    center = candidate.center_world[:2]
    pts, nrm = runtime_surface(runtime)
    pts_w = true_pose.apply(pts)
    nrm_w = true_pose.rotate(nrm)
    grip = gripper_pose_on_table(center, yaw, cfg.table.standoff_mm)
    inv = grip.inverse()
    res = probe_grasp(inv.apply(pts_w), inv.rotate(nrm_w), cfg.gripper,
                      friction=cfg.table.friction,
                      antipodal_tol_deg=cfg.table.antipodal_tol_deg)
    if not res.ok:
        return None
    # Align the closing axis with the mean contact normal (flush settle).
    n_world = grip.rotate(res.contact_a[1])
    settled_yaw = float(np.arctan2(n_world[1], n_world[0]))
    grip = gripper_pose_on_table(center, settled_yaw, cfg.table.standoff_mm)
    inv = grip.inverse()
    res = probe_grasp(inv.apply(pts_w), inv.rotate(nrm_w), cfg.gripper,
                      friction=cfg.table.friction,
                      antipodal_tol_deg=cfg.table.antipodal_tol_deg)
    if not res.ok:
        return None
    grip = grip.compose(Pose.from_translation([res.x_center, 0.0, 0.0]))
    # Exact finger/palm collision check against the true object.
    from ..collision import boxes_intersect_mesh

    rel = grip.inverse().compose(true_pose)
    boxes = cfg.gripper.posed_boxes(rel.inverse(), res.width + 0.02)
    if boxes_intersect_mesh(boxes, runtime.mesh).any():
        return None
    return grip


_SURFACE_CACHE = {}


def runtime_surface(runtime):
    key = id(runtime.mesh)
    if key not in _SURFACE_CACHE:
        _SURFACE_CACHE[key] = surface_samples(runtime.mesh, 20000, seed=17)
    return _SURFACE_CACHE[key]
