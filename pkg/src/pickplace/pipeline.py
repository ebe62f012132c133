"""Staged precompute: mesh -> stable poses -> table grasps -> renders ->
descriptors -> in-air grasps -> edge cache -> quality scores.

Every stage persists under the object's cache directory together with a
hash of the config blocks (and upstream stages) it depends on. A rerun
skips stages whose hashes match and rebuilds everything downstream of a
change. A lock file serializes writers on the directory.
"""

import hashlib
import json
import os
import time
from dataclasses import dataclass

import numpy as np

from .config import ProjectConfig
from .errors import CacheInvalid, EmptyContact
from .geometry.pointcloud import DEFAULT_CLOUD_SIZE, sample_point_cloud
from .geometry.stable import StablePose, compute_stable_poses
from .graspgen.inair import InAirGrasp, sample_in_air_grasps
from .graspgen.table import augment_table_grasps, sample_table_grasps
from .perception.descriptors import (depth_descriptor, pairwise_distances,
                                     tactile_descriptor)
from .perception.library import GraspLibrary, calibrate_beta
from .quality import (composite_scores, graspability, manipulability,
                      smooth_scores)
from .regrasp.edges import (RegraspEdgeCache, build_edge_cache,
                            gripper_box_arrays, pair_gaps)
from .regrasp.fixture import build_fixture, place_check
from .regrasp.graph import min_handoff_counts
from .render.contact import contact_pair
from .render.crop import grasp_crop
from .render.depth import render_depth
from .render.images import ContactMask, DepthImage, load_mask_png
from .render.raycast import RayScene
from .sim.objects import resolve_mesh

MANIFEST = "manifest.json"
STAGES = ("stable", "grasps", "render", "desc", "inair", "edges", "quality")
SCHEMA_VERSION = 1   # bump to invalidate caches when algorithms change


def _h(*parts):
    return hashlib.sha256("|".join(str(p) for p in (SCHEMA_VERSION,) + parts)
                          .encode()).hexdigest()[:16]


def stage_hashes(cfg, mesh):
    mesh_h = _h("mesh", cfg.block_hash("mesh"), mesh.content_hash())
    stable_h = _h("stable", mesh_h)
    grasps_h = _h("grasps", stable_h, cfg.block_hash("gripper"),
                  cfg.block_hash("table"), cfg.block_hash("perturb"))
    render_h = _h("render", grasps_h, cfg.block_hash("render"))
    desc_h = _h("desc", render_h, cfg.block_hash("perception"))
    inair_h = _h("inair", mesh_h, cfg.block_hash("gripper"),
                 cfg.block_hash("inair"))
    edges_h = _h("edges", inair_h)
    quality_h = _h("quality", desc_h, edges_h, cfg.block_hash("fixture"),
                   cfg.block_hash("quality"))
    return {"mesh": mesh_h, "stable": stable_h, "grasps": grasps_h,
            "render": render_h, "desc": desc_h, "inair": inair_h,
            "edges": edges_h, "quality": quality_h}


class CacheLock:
    def __init__(self, directory):
        self.path = os.path.join(directory, ".lock")

    def __enter__(self):
        os.makedirs(os.path.dirname(self.path), exist_ok=True)
        if os.path.exists(self.path):
            try:
                pid = int(open(self.path).read().strip())
                os.kill(pid, 0)
                raise CacheInvalid(f"cache locked by running pid {pid}: {self.path}")
            except (ValueError, ProcessLookupError, PermissionError):
                os.remove(self.path)   # stale lock
        with open(self.path, "w") as f:
            f.write(str(os.getpid()))
        return self

    def __exit__(self, *exc):
        if os.path.exists(self.path):
            os.remove(self.path)


def grasp_pixel_frame(camera, gripper_pose):
    """Project a grasp's TCP and closing axis into image coordinates."""
    tcp = gripper_pose.trans
    axis = gripper_pose.rotate(np.array([1.0, 0.0, 0.0]))
    u0, v0, _ = camera.project(tcp[None, :])
    u1, v1, _ = camera.project((tcp + 5.0 * axis)[None, :])
    angle = float(np.arctan2(v1[0] - v0[0], u1[0] - u0[0]))
    return float(u0[0]), float(v0[0]), angle


@dataclass
class Runtime:
    config: ProjectConfig
    mesh: object
    scene: RayScene
    stable_poses: list
    library: GraspLibrary
    in_air: list
    edge_cache: RegraspEdgeCache
    place_ok: np.ndarray
    place_quality: np.ndarray
    fixture: object
    camera: object


def cache_dir_for(cfg):
    return os.path.join(cfg.cache_dir, cfg.name())


def _load_manifest(directory):
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        return {}
    try:
        with open(path) as f:
            data = json.load(f)
        if not isinstance(data.get("stages"), dict):
            raise ValueError("bad structure")
        return data
    except (json.JSONDecodeError, ValueError) as e:
        raise CacheInvalid(f"corrupt manifest {path}: {e}") from None


def _files_exist(directory, names):
    return all(os.path.exists(os.path.join(directory, n)) for n in names)


def precompute(cfg, log=lambda msg: None):
    """Run (or resume) the full precompute for one object. Returns a dict
    with stage statuses: 'built' or 'cached'."""
    directory = cache_dir_for(cfg)
    os.makedirs(directory, exist_ok=True)
    mesh = resolve_mesh(cfg.mesh.path, cfg.mesh.scale)
    hashes = stage_hashes(cfg, mesh)
    status = {}

    with CacheLock(directory):
        manifest = _load_manifest(directory)
        stored = manifest.get("stages", {})
        meta = manifest.get("meta", {})
        t0 = time.time()

        def fresh(stage, files):
            return stored.get(stage) == hashes[stage] and _files_exist(directory, files)

        scene = RayScene(mesh)

        # --- stable poses ----------------------------------------------------
        if fresh("stable", ["stable.json"]):
            with open(os.path.join(directory, "stable.json")) as f:
                stable = [StablePose.from_dict(d) for d in json.load(f)]
            status["stable"] = "cached"
        else:
            stable = compute_stable_poses(mesh)
            with open(os.path.join(directory, "stable.json"), "w") as f:
                json.dump([sp.to_dict() for sp in stable], f, indent=1)
            stored["stable"] = hashes["stable"]
            status["stable"] = "built"
        log(f"stable poses: {len(stable)} [{status['stable']}]")

        # --- table grasps ------------------------------------------------------
        from .graspgen.table import TableGrasp

        if fresh("grasps", ["grasps.json"]):
            with open(os.path.join(directory, "grasps.json")) as f:
                grasps = [TableGrasp.from_dict(d) for d in json.load(f)]
            status["grasps"] = "cached"
        else:
            base = sample_table_grasps(mesh, stable, cfg.gripper, cfg.table)
            grasps = augment_table_grasps(base, mesh, stable, cfg.gripper,
                                          cfg.perturb)
            if cfg.table.max_total and len(grasps) > cfg.table.max_total:
                idx = np.linspace(0, len(grasps) - 1, cfg.table.max_total).astype(int)
                grasps = [grasps[i] for i in idx]
                for new_id, g in enumerate(grasps):
                    g.id = new_id
            with open(os.path.join(directory, "grasps.json"), "w") as f:
                json.dump([g.to_dict() for g in grasps], f, indent=1)
            stored["grasps"] = hashes["grasps"]
            status["grasps"] = "built"
        log(f"table grasps: {len(grasps)} [{status['grasps']}]")

        # --- renders ------------------------------------------------------------
        camera = cfg.render.camera()
        crops = masks = widths = None
        if fresh("render", ["widths.npy", "crops", "masks"]):
            status["render"] = "cached"
            widths = np.load(os.path.join(directory, "widths.npy"))
        else:
            crops, masks, widths, grasps = _render_stage(
                cfg, directory, mesh, scene, stable, grasps, camera, log)
            with open(os.path.join(directory, "grasps.json"), "w") as f:
                json.dump([g.to_dict() for g in grasps], f, indent=1)
            np.save(os.path.join(directory, "widths.npy"), widths)
            stored["render"] = hashes["render"]
            status["render"] = "built"
        log(f"renders: {len(grasps)} grasps [{status['render']}]")

        # --- descriptors ----------------------------------------------------------
        if fresh("desc", ["descriptors.bin", "cloud.npy"]):
            status["desc"] = "cached"
        else:
            if crops is None:
                crops, masks = _load_images(directory, len(grasps))
            library = _descriptor_stage(cfg, mesh, grasps, crops, masks, widths)
            library.save(directory)
            stored["desc"] = hashes["desc"]
            status["desc"] = "built"
        log(f"descriptors [{status['desc']}]")

        # --- in-air grasps -----------------------------------------------------------
        if fresh("inair", ["inair.json"]):
            with open(os.path.join(directory, "inair.json")) as f:
                in_air = [InAirGrasp.from_dict(d) for d in json.load(f)]
            status["inair"] = "cached"
        else:
            in_air = sample_in_air_grasps(mesh, cfg.gripper, cfg.inair)
            with open(os.path.join(directory, "inair.json"), "w") as f:
                json.dump([g.to_dict() for g in in_air], f, indent=1)
            stored["inair"] = hashes["inair"]
            status["inair"] = "built"
        log(f"in-air grasps: {len(in_air)} [{status['inair']}]")

        # --- edge cache ------------------------------------------------------------
        if fresh("edges", ["edges.bin"]):
            status["edges"] = "cached"
        else:
            cache = build_edge_cache(in_air, cfg.gripper, mesh=mesh,
                                     meta={"hash": hashes["edges"]})
            cache.save(os.path.join(directory, "edges.bin"),
                       os.path.join(directory, "edges_manifest.json"))
            stored["edges"] = hashes["edges"]
            status["edges"] = "built"
        log(f"edge cache [{status['edges']}]")

        # --- quality ------------------------------------------------------------------
        if fresh("quality", ["quality.csv", "placement.json"]):
            status["quality"] = "cached"
        else:
            library = GraspLibrary.load(directory)
            cache = RegraspEdgeCache.load(os.path.join(directory, "edges.bin"))
            _quality_stage(cfg, directory, mesh, library, in_air, cache,
                           stable, log)
            stored["quality"] = hashes["quality"]
            status["quality"] = "built"
        log(f"quality scores [{status['quality']}]")

        meta.update({"object": cfg.name(), "grasp_count": len(grasps),
                     "in_air_count": len(in_air),
                     "elapsed_s": round(time.time() - t0, 3)})
        if any(v == "built" for v in status.values()):
            with open(os.path.join(directory, MANIFEST), "w") as f:
                json.dump({"stages": stored, "meta": meta}, f, indent=1,
                          sort_keys=True)
    return status


def _render_stage(cfg, directory, mesh, scene, stable, grasps, camera, log):
    crop_px = cfg.render.crop_px
    pitch = cfg.render.sensor_mm_per_px
    delta = cfg.render.penetration_mm

    scene_images = {}
    for si in sorted({g.source_stable_pose for g in grasps}):
        posed = RayScene(mesh.transformed(stable[si].pose))
        scene_images[si] = render_depth(mesh, stable[si].pose, camera,
                                        table=True, scene=posed)

    crops, masks, widths, kept = [], [], [], []
    dropped = 0
    for g in grasps:
        try:
            mask_a, mask_b, width = contact_pair(mesh, g.object_in_gripper,
                                                 cfg.gripper, scene=scene,
                                                 penetration_mm=delta,
                                                 mm_per_px=pitch)
        except EmptyContact:
            dropped += 1
            continue
        u, v, angle = grasp_pixel_frame(camera, g.gripper_in_table)
        crop = grasp_crop(scene_images[g.source_stable_pose], (u, v), angle,
                          crop_px)
        crops.append(crop)
        masks.append(ContactMask(mask_a, mask_b))
        widths.append(width)
        kept.append(g)
    if dropped:
        log(f"  dropped {dropped} grasps with empty contact")
    for new_id, g in enumerate(kept):
        g.id = new_id

    cdir = os.path.join(directory, "crops")
    mdir = os.path.join(directory, "masks")
    os.makedirs(cdir, exist_ok=True)
    os.makedirs(mdir, exist_ok=True)
    from .render.images import save_mask_png

    for i, (crop, cm) in enumerate(zip(crops, masks)):
        crop.save_png(os.path.join(cdir, f"c{i:05d}.png"))
        save_mask_png(cm.mask_a, os.path.join(mdir, f"m{i:05d}_a.png"))
        save_mask_png(cm.mask_b, os.path.join(mdir, f"m{i:05d}_b.png"))
    return crops, masks, np.asarray(widths), kept


def _load_images(directory, count):
    crops = [DepthImage.load_png(os.path.join(directory, "crops", f"c{i:05d}.png"))
             for i in range(count)]
    masks = [ContactMask(
        load_mask_png(os.path.join(directory, "masks", f"m{i:05d}_a.png")),
        load_mask_png(os.path.join(directory, "masks", f"m{i:05d}_b.png")))
        for i in range(count)]
    return crops, masks


def _descriptor_stage(cfg, mesh, grasps, crops, masks, widths):
    pitch = cfg.render.sensor_mm_per_px
    depth_desc = np.stack([depth_descriptor(c) for c in crops])
    clip = cfg.perception.edt_clip_px
    tact_desc = np.stack([tactile_descriptor(m.mask_a, m.mask_b, pitch, clip)
                          for m in masks])
    beta_d = calibrate_beta(depth_desc, cfg.perception.beta_scale,
                            cfg.perception.beta_max_pairs)
    beta_t = calibrate_beta(tact_desc, cfg.perception.tactile_scale(),
                            cfg.perception.beta_max_pairs)
    cloud = sample_point_cloud(mesh, DEFAULT_CLOUD_SIZE, seed=0)
    return GraspLibrary(grasps, depth_desc.astype(np.float32),
                        tact_desc.astype(np.float32),
                        np.asarray(widths, dtype=np.float64),
                        beta_d, beta_t, cloud, crops, masks)


def goal_pose_from_config(cfg, stable):
    from .geometry.pose import Pose

    sp = stable[cfg.fixture.goal_stable_index]
    yaw = np.deg2rad(cfg.fixture.goal_yaw_deg)
    return Pose.from_axis_angle([0.0, 0.0, 1.0], yaw).compose(sp.pose)


def _quality_stage(cfg, directory, mesh, library, in_air, cache, stable, log):
    n = len(library)
    grasp_v = np.array([graspability(m) for m in _masks_of(library, directory)])
    obs_v = _observability_vector(cfg, library)
    log(f"  observability: {int(obs_v.sum())}/{n} observable")

    fixture = build_fixture(mesh, goal_pose_from_config(cfg, stable),
                            cfg.fixture.cavity_depth_mm,
                            cfg.fixture.radial_clearance_mm)
    place_ok_g = np.zeros(len(in_air), dtype=bool)
    place_q_g = np.zeros(len(in_air))
    for i, g in enumerate(in_air):
        place_ok_g[i], place_q_g[i] = place_check(g.object_in_gripper, g.width,
                                                  cfg.gripper, fixture)
    start_place = np.zeros(n, dtype=bool)
    for i, g in enumerate(library.grasps):
        start_place[i], _ = place_check(g.object_in_gripper, g.width,
                                        cfg.gripper, fixture)
    start_feasible = _start_feasibility(cfg, mesh, library.grasps, in_air)
    counts = min_handoff_counts(start_feasible, start_place, cache, place_ok_g)
    mani_v = np.array([manipulability(int(c)) if c >= 0 else 0.0 for c in counts])

    comp = composite_scores(grasp_v, obs_v, mani_v)
    smoothed = smooth_scores(comp, library.grasps, cfg.quality)
    library.scores = {"graspability": grasp_v, "observability": obs_v,
                      "manipulability": mani_v, "composite": comp,
                      "smoothed": smoothed}
    library._save_scores(os.path.join(directory, "quality.csv"))
    with open(os.path.join(directory, "placement.json"), "w") as f:
        json.dump({"fixture": fixture.to_dict(),
                   "place_ok": place_ok_g.tolist(),
                   "place_quality": place_q_g.tolist(),
                   "direct_place": start_place.tolist(),
                   "handoff_counts": counts.tolist()}, f, indent=1)


def _masks_of(library, directory):
    if library.masks is not None:
        return library.masks
    _, masks = _load_images(directory, len(library))
    library.masks = masks
    return masks


def _observability_vector(cfg, library, chunk=512):
    """Self-observation test for every grasp, chunked to bound memory."""
    n = len(library)
    qcfg = cfg.quality
    w = library.widths
    out = np.zeros(n)
    add_cache = {}

    def add(i, j):
        key = (min(i, j), max(i, j))
        if key not in add_cache:
            add_cache[key] = library.add_between(*key)
        return add_cache[key]

    k = min(qcfg.observe_top_k, n)
    idx = np.arange(n)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        dd = pairwise_distances(library.depth_descriptors[lo:hi],
                                library.depth_descriptors)
        dt = pairwise_distances(library.tactile_descriptors[lo:hi],
                                library.tactile_descriptors)
        dw = (w[lo:hi, None] - w[None, :]) ** 2 / (2.0 * qcfg.width_sigma_mm ** 2)
        logits = -library.beta_depth * dd - library.beta_tactile * dt - dw
        for r, i in enumerate(range(lo, hi)):
            row = logits[r]
            order = np.lexsort((idx, -row))
            best = int(order[0])
            if add(best, i) > qcfg.observe_argmax_mm:
                continue
            top = order[:k]
            vals = []
            for a in range(len(top)):
                for b in range(a + 1, len(top)):
                    vals.append(add(int(top[a]), int(top[b])))
            spread = 0.0
            if vals:
                spread = max(vals) if qcfg.spread_rule == "max" \
                    else float(np.mean(vals))
            if spread <= qcfg.observe_spread_mm:
                out[i] = 1.0
    return out


def _start_feasibility(cfg, mesh, table_grasps, in_air, chunk=200):
    """(T, G) gripper-gripper feasibility between table and in-air grasps."""
    from .collision import boxes_intersect_mesh

    t_poses = [g.object_in_gripper.inverse() for g in table_grasps]
    g_poses = [g.object_in_gripper.inverse() for g in in_air]
    t_arrays = gripper_box_arrays(t_poses, [g.width for g in table_grasps],
                                  cfg.gripper)
    g_arrays = gripper_box_arrays(g_poses, [g.width for g in in_air], cfg.gripper)
    nt, ng = len(table_grasps), len(in_air)
    pen_g = np.zeros(ng, dtype=bool)
    for i, (pose, g) in enumerate(zip(g_poses, in_air)):
        pen_g[i] = boxes_intersect_mesh(cfg.gripper.posed_boxes(pose, g.width + 0.02),
                                        mesh).any()
    out = np.zeros((nt, ng), dtype=bool)
    jj_all = np.arange(ng)
    for lo in range(0, nt, chunk):
        hi = min(lo + chunk, nt)
        ii = np.repeat(np.arange(lo, hi), ng)
        jj = np.tile(jj_all, hi - lo)
        gaps = pair_gaps(t_arrays, g_arrays, ii, jj)
        out[lo:hi] = (gaps > 0).reshape(hi - lo, ng)
    out[:, pen_g] = False
    return out


def load_runtime(cfg):
    """Load every artifact an episode needs; fail with guidance if stale."""
    directory = cache_dir_for(cfg)
    mesh = resolve_mesh(cfg.mesh.path, cfg.mesh.scale)
    hashes = stage_hashes(cfg, mesh)
    manifest = _load_manifest(directory)
    stored = manifest.get("stages", {})
    for stage in STAGES:
        if stored.get(stage) != hashes[stage]:
            raise CacheInvalid(
                f"cache for '{cfg.name()}' is missing or stale at stage "
                f"'{stage}'; run `pickplace precompute` first")
    with open(os.path.join(directory, "stable.json")) as f:
        stable = [StablePose.from_dict(d) for d in json.load(f)]
    library = GraspLibrary.load(directory)
    with open(os.path.join(directory, "inair.json")) as f:
        in_air = [InAirGrasp.from_dict(d) for d in json.load(f)]
    cache = RegraspEdgeCache.load(os.path.join(directory, "edges.bin"))
    with open(os.path.join(directory, "placement.json")) as f:
        placement = json.load(f)
    from .regrasp.fixture import PlacementFixture

    fixture = PlacementFixture.from_dict(placement["fixture"])
    return Runtime(cfg, mesh, RayScene(mesh), stable, library, in_air, cache,
                   np.asarray(placement["place_ok"], dtype=bool),
                   np.asarray(placement["place_quality"]),
                   fixture, cfg.render.camera())
