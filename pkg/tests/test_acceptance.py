"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines. The
heavyweight object libraries come from session fixtures and are shared
with the rest of the suite.
"""

import dataclasses
import time

import numpy as np
import pytest

from helpers import make_library, one_hot_descriptors
from pickplace.geometry import Pose, add_distance, sample_point_cloud
from pickplace.geometry.primitives import box_mesh, icosphere
from pickplace.graspgen import GripperModel
from pickplace.perception import PoseDistribution, fuse
from pickplace.perception.descriptors import pairwise_distances
from pickplace.quality import expected_quality, manipulability, observability, smooth_scores
from pickplace.regrasp import RegraspEdgeCache, build_edge_cache, check_regrasp
from pickplace.render import VirtualCamera, render_contact, render_depth
from pickplace.sim.episode import run_episode

GRIPPER = GripperModel()


def report(criterion, detail):
    print(f"[PASS] criterion {criterion}: {detail}")


# -----------------------------------------------------------------------------
def test_criterion_01_metric_axioms():
    start = time.time()
    cloud = sample_point_cloud(box_mesh((20, 20, 20)), 512, seed=0)
    rng = np.random.default_rng(0)

    def rand_pose():
        return Pose(rng.normal(size=4), rng.uniform(-50, 50, 3))

    for _ in range(1000):
        a, b, c = rand_pose(), rand_pose(), rand_pose()
        dab = add_distance(cloud, a, b)
        assert abs(dab - add_distance(cloud, b, a)) < 1e-9
        assert dab >= 0
        assert add_distance(cloud, a, c) <= dab + add_distance(cloud, b, c) + 1e-9
        assert add_distance(cloud, a, a) == 0.0
    # Pure translation returns the exact vector norm.
    t = Pose.from_translation([3.0, 4.0, 0.0])
    assert abs(add_distance(cloud, Pose.identity(), t) - 5.0) < 1e-12
    elapsed = time.time() - start
    assert elapsed < 10.0
    report(1, f"ADD axioms on 1000 triples in {elapsed:.1f}s, translation exact")


# -----------------------------------------------------------------------------
def test_criterion_02_distribution_correctness():
    rng = np.random.default_rng(1)
    worst_sum = 0.0
    worst_comm = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        dists = []
        for _ in range(3):
            p = rng.random(n) + 1e-9
            dists.append(PoseDistribution(p / p.sum()))
        a, b, c = dists
        ab_c = fuse([fuse([a, b]), c]).probs
        a_bc = fuse([a, fuse([b, c])]).probs
        b_ac = fuse([b, fuse([a, c])]).probs
        worst_sum = max(worst_sum, abs(ab_c.sum() - 1.0))
        worst_comm = max(worst_comm, np.abs(ab_c - a_bc).max(),
                         np.abs(ab_c - b_ac).max())
    assert worst_sum < 1e-9
    assert worst_comm < 1e-12
    # Uniform identity and delta absorption, exact.
    p = PoseDistribution(np.array([0.5, 0.25, 0.25]))
    u = PoseDistribution.uniform(3)
    assert np.abs(fuse([p, u]).probs - p.probs).max() < 1e-12
    delta = PoseDistribution(np.array([0.0, 1.0, 0.0]))
    assert fuse([delta, p]).probs[1] == 1.0
    report(2, f"1000 fusion triples: sum err {worst_sum:.1e}, "
              f"comm/assoc err {worst_comm:.1e}")


# -----------------------------------------------------------------------------
def test_criterion_03_round_trip_identifiability(cube_runtime):
    start = time.time()
    lib = cube_runtime.library
    n = len(lib)
    assert n >= 200
    dd = pairwise_distances(lib.depth_descriptors, lib.depth_descriptors)
    dt = pairwise_distances(lib.tactile_descriptors, lib.tactile_descriptors)
    w = lib.widths
    sigma = cube_runtime.config.perception.width_sigma_mm
    logits = (-lib.beta_depth * dd - lib.beta_tactile * dt
              - (w[:, None] - w[None, :]) ** 2 / (2 * sigma * sigma))
    hits = 0
    for i in range(n):
        best = int(np.lexsort((np.arange(n), -logits[i]))[0])
        if best == i:
            hits += 1
            continue
        if lib.add_between(best, i) <= lib.nn_spacing(i) + 1e-9:
            hits += 1
    rate = hits / n
    elapsed = time.time() - start
    assert rate >= 0.99, rate
    assert elapsed < 120.0
    report(3, f"{n}-grasp library, round-trip rate {rate:.4f} in {elapsed:.0f}s")


# -----------------------------------------------------------------------------
def lib_with_ranked_neighbors(offset_mm, twin_first=False):
    n = 6
    offsets = [(0.0, 0.0, 0.0), (offset_mm, 0.0, 0.0), (-offset_mm, 0.0, 0.0),
               (0.0, offset_mm, 0.0), (0.0, -offset_mm, 0.0), (40.0, 40.0, 0.0)]
    depth = np.zeros((n, 8), dtype=np.float32)
    tact = np.zeros((n, 8), dtype=np.float32)
    for i in range(n):
        depth[i, i] = 1.0
        tact[i, i] = 1.0
    for i in range(1, 5):
        depth[i] = depth[0]
        depth[i, i] = 0.35
        tact[i] = tact[0]
        tact[i, i] = 0.35
    widths = np.full(n, 12.0)
    if twin_first:
        offsets.insert(0, (20.0, 0.0, 0.0))
        depth = np.vstack([depth[0], depth])
        tact = np.vstack([tact[0], tact])
        widths = np.concatenate([[12.0], widths])
    return make_library(offsets, depth, tact, widths, beta_depth=8.0,
                        beta_tactile=8.0)


def test_criterion_04_quality_table_exactness():
    # Manipulability mapping, exact.
    assert manipulability(0) == 1.0
    assert manipulability(1) == 0.8
    assert manipulability(2) == 0.4
    assert manipulability(3) == 0.0
    assert manipulability(None) == 0.0
    # Observability thresholds just inside / outside.
    assert observability(0, lib_with_ranked_neighbors(0.9)) == 1   # spread 1.8
    assert observability(0, lib_with_ranked_neighbors(1.1)) == 0   # spread 2.2
    assert observability(1, lib_with_ranked_neighbors(0.9, twin_first=True)) == 0
    assert observability(0, make_library([(0, 0, 0)], one_hot_descriptors(1, 4),
                                         one_hot_descriptors(1, 4), [10.0])) == 1
    # Smoothing formula against a hand-computed neighborhood.
    from helpers import make_library as ml
    lib = ml([(0, 0, 0)] * 4, one_hot_descriptors(4, 4), one_hot_descriptors(4, 4),
             np.full(4, 10.0), gripper_xy=[(0, 0), (3, 0), (6, 0), (9, 0)])
    smoothed = smooth_scores(np.array([1.0, 0.0, 0.0, 1.0]), lib.grasps)
    assert smoothed[0] == min(1.0, np.median([0, 0, 1]), np.mean([0, 0, 1])) == 0.0
    report(4, "manipulability table, observability thresholds, smoothing formula")


# -----------------------------------------------------------------------------
def test_criterion_05_planner_optimality():
    from pickplace.regrasp.graph import GOAL, START, RegraspGraph, shortest_path
    from pickplace.regrasp.fixture import build_fixture
    from pickplace.graspgen.inair import InAirGrasp, grasp_frame

    start_time = time.time()

    def dummy(gid):
        grip, width = grasp_frame(np.array([0.0, 5, 0]), np.array([0.0, -5, 0]),
                                  0.0, 18.0)
        return InAirGrasp(gid, grip.inverse(), width, np.zeros((2, 3)),
                          np.zeros((2, 3)))

    fixture = build_fixture(box_mesh((20, 20, 20), center=(0, 0, 10)),
                            Pose.identity())

    def enumerate_paths(edges, node, seen):
        if node == GOAL:
            yield (0, 0.0)
            return
        for nxt, handoff, weight in edges.get(node, []):
            if nxt in seen:
                continue
            for h, wsum in enumerate_paths(edges, nxt, seen | {nxt}):
                yield (h + handoff, wsum + weight)

    rng = np.random.default_rng(5)
    for trial in range(200):
        n = int(rng.integers(2, 11))
        edges = {START: [], GOAL: []}
        for i in range(n):
            edges[i] = []
        for a in [START] + list(range(n)):
            for b in list(range(n)) + [GOAL]:
                if a == b or rng.random() > 0.3:
                    continue
                handoff = 0 if b == GOAL else 1
                edges[a].append((b, handoff, float(np.round(rng.random(), 6))))
        graph = RegraspGraph(edges, dummy(0), [dummy(i) for i in range(n)], fixture)
        plan = shortest_path(graph)
        best = None
        for cost in enumerate_paths(edges, START, {START}):
            if best is None or cost < best:
                best = cost
        if best is None:
            assert plan is None
        else:
            assert plan is not None
            assert plan.regrasp_count == best[0]
            assert abs(plan.total_weight - best[1]) < 1e-9
    elapsed = time.time() - start_time
    assert elapsed < 30.0
    report(5, f"200 random graphs match exhaustive enumeration in {elapsed:.1f}s")


# -----------------------------------------------------------------------------
def test_criterion_06_regrasp_cache_oracle(tmp_path):
    from pickplace.graspgen.inair import InAirGrasp, grasp_frame

    rng = np.random.default_rng(6)
    grasps = []
    for i in range(50):
        center = rng.uniform(-40, 40, 3)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        half_w = rng.uniform(3, 14)
        grip, width = grasp_frame(center + half_w * axis, center - half_w * axis,
                                  rng.uniform(0, 2 * np.pi), 18.0)
        grasps.append(InAirGrasp(i, grip.inverse(), width, np.zeros((2, 3)),
                                 np.zeros((2, 3))))
    cache = build_edge_cache(grasps, GRIPPER)
    for i in range(50):
        for j in range(i + 1, 50):
            feasible, quality = check_regrasp(grasps[i], grasps[j], GRIPPER)
            assert cache.feasible[i, j] == cache.feasible[j, i] == feasible
            assert abs(cache.quality[i, j] - quality) < 1e-6
    p1 = tmp_path / "edges1.bin"
    p2 = tmp_path / "edges2.bin"
    cache.save(p1)
    reloaded = RegraspEdgeCache.load(p1)
    assert np.array_equal(cache.feasible, reloaded.feasible)
    assert np.array_equal(cache.quality, reloaded.quality)
    reloaded.save(p2)
    assert p1.read_bytes() == p2.read_bytes()
    report(6, "50-grasp cache equals pairwise loop; persistence bit-identical")


# -----------------------------------------------------------------------------
def test_criterion_07_rendering_analytics():
    # Flat 15x15 face on the 24x18 sensor at 0.2 mm/px: 75x75 px rectangle.
    box = box_mesh((15, 15, 15))
    pose = Pose.from_translation([0.0, 0.0, 9.0])
    mask = render_contact(box, pose, GRIPPER, "A", penetration_mm=1.0,
                          mm_per_px=0.2)
    cols = int(mask.any(axis=0).sum())
    rows = int(mask.any(axis=1).sum())
    assert abs(cols - 75) <= 2 and abs(rows - 75) <= 2
    assert mask.sum() == cols * rows

    # Sphere chord disc: r = sqrt(2*10*1 - 1) mm.
    sphere = icosphere(10.0, 4)
    mask = render_contact(sphere, pose, GRIPPER, "A", penetration_mm=1.0,
                          mm_per_px=0.2)
    expected_px = np.sqrt(19.0) / 0.2
    cols = mask.any(axis=0).sum()
    assert abs(cols / 2.0 - expected_px) <= 6   # facet error + 1 px

    # Cube on table: exact depths away from silhouette edges.
    cam = VirtualCamera.top_down(500.0, 600.0, 160, 120)
    cube = box_mesh((20, 20, 20), center=(0, 0, 10))
    img = render_depth(cube, Pose.identity(), cam, table=True)
    assert abs(img.depth[60, 80] - 480.0) < 1e-9
    assert abs(img.depth[5, 5] - 500.0) < 1e-9
    report(7, "contact rectangle, penetration disc, and cube depths analytic")


# -----------------------------------------------------------------------------
def test_criterion_08_keyed_rod_method_ordering(rod_runtime):
    lib = rod_runtime.library
    seeds = list(range(50))
    success = {}
    keyed = 0
    for method in ("simple", "tactile_only", "vision_only", "agnostic"):
        wins = 0
        for seed in seeds:
            r = run_episode(rod_runtime, method, seed)
            if r.outcome == "Success":
                wins += 1
            if method == "simple" and r.true_grasp_id >= 0:
                x = lib.grasps[r.true_grasp_id].gripper_in_table.trans[0]
                keyed += x < -10.0   # the paddle region
        success[method] = wins
    assert success["tactile_only"] < success["simple"], success
    assert success["vision_only"] < success["simple"], success
    assert success["agnostic"] < success["simple"], success
    concentration = keyed / len(seeds)
    assert concentration >= 0.8, concentration
    # Expected-quality oracle within 1e-12.
    rng = np.random.default_rng(11)
    smoothed = lib.scores["smoothed"]
    worst = 0.0
    for _ in range(50):
        p = rng.random(len(lib)) + 1e-12
        dist = PoseDistribution(p / p.sum())
        brute = sum(smoothed[i] * dist.probs[i] for i in range(len(lib)))
        worst = max(worst, abs(expected_quality(smoothed, dist) - brute))
    assert worst < 1e-12
    report(8, f"success {success}, keyed-end concentration {concentration:.2f}, "
              f"E[q] oracle err {worst:.1e}")


# -----------------------------------------------------------------------------
def test_criterion_09_stepped_block_planning_trap(block_runtime):
    seeds = list(range(50))
    planning_failures = {}
    for method in ("simple", "agnostic"):
        count = 0
        for seed in seeds:
            r = run_episode(block_runtime, method, seed)
            if r.outcome == "Failure" and r.failure_kind == "planning":
                count += 1
        planning_failures[method] = count
    assert planning_failures["simple"] == 0, planning_failures
    assert planning_failures["agnostic"] > 0, planning_failures
    report(9, f"planning failures {planning_failures}")


# -----------------------------------------------------------------------------
def quiet_runtime(runtime):
    cfg = dataclasses.replace(runtime.config)
    cfg.sim = dataclasses.replace(runtime.config.sim)
    cfg.sim.noise = dataclasses.replace(
        runtime.config.sim.noise, depth_sigma_mm=0.0, dropout_rate=0.0,
        mask_flip_rate=0.0, erode_px=0, dilate_px=0)
    cfg.sim.perturb_sigma_mm = 0.0
    cfg.sim.perturb_sigma_deg = 0.0
    cfg.sim.handoff_sigma_mm = 0.0
    cfg.sim.handoff_sigma_deg = 0.0
    return dataclasses.replace(runtime, config=cfg)


def test_criterion_10_zero_noise_end_to_end(cube_runtime, rod_runtime,
                                            bracket_runtime):
    results = {}
    for name, runtime in (("notched_cube", cube_runtime),
                          ("keyed_rod", rod_runtime),
                          ("l_bracket", bracket_runtime)):
        rt = quiet_runtime(runtime)
        wins = sum(run_episode(rt, "simple", seed).outcome == "Success"
                   for seed in range(50))
        results[name] = wins
        assert wins == 50, (name, wins)
    report(10, f"zero-noise successes {results} (50/50 each)")


# -----------------------------------------------------------------------------
def test_criterion_11_performance_envelope(tmp_path_factory):
    from pickplace.pipeline import load_runtime, precompute
    from pickplace.sim.presets import preset_config

    cfg = preset_config("facet_block",
                        cache_dir=str(tmp_path_factory.mktemp("perf_cache")))
    start = time.time()
    precompute(cfg)
    build_s = time.time() - start
    runtime = load_runtime(cfg)
    assert len(runtime.mesh.triangles) >= 900   # ~1000-triangle mesh
    assert len(runtime.library) <= 5000
    assert len(runtime.in_air) <= 300
    assert build_s <= 300.0, build_s
    run_episode(runtime, "simple", 0)   # warm the kernels
    times = []
    for seed in (1, 2, 3):
        t0 = time.time()
        run_episode(runtime, "simple", seed)
        times.append(time.time() - t0)
    episode_s = float(np.median(times))
    assert episode_s <= 2.0, times
    report(11, f"precompute {build_s:.0f}s for {len(runtime.library)} grasps / "
               f"{len(runtime.in_air)} in-air; warm episode {episode_s:.2f}s")
