import numpy as np

from helpers import make_library, one_hot_descriptors
from pickplace.perception import PoseDistribution
from pickplace.quality import (QualityConfig, composite_scores, expected_quality,
                               graspability, manipulability, observability,
                               smooth_scores)
from pickplace.render.images import ContactMask


# --- graspability -------------------------------------------------------------

def test_graspability_extremes():
    full = ContactMask(np.ones((10, 12), dtype=bool), np.ones((10, 12), dtype=bool))
    empty = ContactMask(np.zeros((10, 12), dtype=bool), np.zeros((10, 12), dtype=bool))
    assert graspability(full) == 1.0
    assert graspability(empty) == 0.0


def test_graspability_mixed_counts():
    a = np.zeros((10, 12), dtype=bool)
    a[:5, :] = True                      # half on
    b = np.zeros((10, 12), dtype=bool)
    b[:5, :6] = True                     # quarter on
    got = graspability(ContactMask(a, b))
    # Brute-force pixel count oracle.
    expect = (a.sum() + b.sum()) / (2 * 10 * 12)
    assert got == expect == 0.375


# --- observability -------------------------------------------------------------

def lib_with_neighbors(neighbor_offset_mm, twin_first=False):
    """Grasp under test plus 4 rank-next neighbors at a controlled spacing."""
    n = 6
    offsets = [(0.0, 0.0, 0.0),
               (neighbor_offset_mm, 0.0, 0.0),
               (-neighbor_offset_mm, 0.0, 0.0),
               (0.0, neighbor_offset_mm, 0.0),
               (0.0, -neighbor_offset_mm, 0.0),
               (40.0, 40.0, 0.0)]
    dim = 8
    depth = np.zeros((n, dim), dtype=np.float32)
    tactile = np.zeros((n, dim), dtype=np.float32)
    for i in range(n):
        depth[i, i] = 1.0
        tactile[i, i] = 1.0
    # Query grasp 0; neighbors 1-4 nearby in descriptor space, 5 far away.
    for i in range(1, 5):
        depth[i] = depth[0]
        depth[i, i] = 0.35
        tactile[i] = tactile[0]
        tactile[i, i] = 0.35
    widths = np.full(n, 12.0)
    if twin_first:
        # An exact observation twin 20 mm away, with a LOWER id than the query.
        offsets.insert(0, (20.0, 0.0, 0.0))
        depth = np.vstack([depth[0], depth])
        tactile = np.vstack([tactile[0], tactile])
        widths = np.concatenate([[12.0], widths])
    return make_library(offsets, depth, tactile, widths,
                        beta_depth=8.0, beta_tactile=8.0)


def test_observable_when_neighbors_tight():
    lib = lib_with_neighbors(0.9)     # top-5 pairwise ADD max = 1.8 < 2
    assert observability(0, lib) == 1


def test_not_observable_when_neighbors_spread():
    lib = lib_with_neighbors(1.1)     # top-5 pairwise ADD max = 2.2 > 2
    assert observability(0, lib) == 0


def test_not_observable_when_argmax_far():
    lib = lib_with_neighbors(0.9, twin_first=True)
    # Grasp 1 is the query; its exact twin sits at id 0, 20 mm away, and
    # wins the tie: argmax lands past the 5 mm gate.
    assert observability(1, lib) == 0


def test_single_grasp_library_observable():
    lib = make_library([(0.0, 0.0, 0.0)], one_hot_descriptors(1, 4),
                       one_hot_descriptors(1, 4), [10.0])
    assert observability(0, lib) == 1


# --- manipulability -------------------------------------------------------------

def test_manipulability_table():
    assert manipulability(0) == 1.0
    assert manipulability(1) == 0.8
    assert manipulability(2) == 0.4
    assert manipulability(3) == 0.0
    assert manipulability(None) == 0.0
    assert manipulability(-1) == 0.0


def test_composite_product():
    c = composite_scores([0.5, 1.0, 0.2], [1, 0, 1], [0.8, 1.0, 0.0])
    assert np.allclose(c, [0.4, 0.0, 0.0], atol=1e-12)


# --- smoothing ------------------------------------------------------------------

def grasps_at(xs, ys):
    from helpers import make_library
    lib = make_library([(0, 0, 0)] * len(xs),
                       one_hot_descriptors(len(xs), 4),
                       one_hot_descriptors(len(xs), 4),
                       np.full(len(xs), 10.0),
                       gripper_xy=list(zip(xs, ys)))
    return lib.grasps


def test_smoothing_hand_computed():
    # Grasp 0 at the origin; neighbors at 3, 6, 9 mm with scores 0, 0, 1.
    grasps = grasps_at([0.0, 3.0, 6.0, 9.0], [0.0, 0.0, 0.0, 0.0])
    scores = np.array([1.0, 0.0, 0.0, 1.0])
    out = smooth_scores(scores, grasps)
    # Neighbors of 0: {0, 0, 1} -> min(1, median=0, mean=1/3) = 0.
    assert out[0] == 0.0


def test_isolated_grasp_unchanged():
    grasps = grasps_at([0.0, 50.0], [0.0, 50.0])
    scores = np.array([0.7, 0.9])
    out = smooth_scores(scores, grasps)
    assert np.array_equal(out, scores)


def test_equal_scores_stay_equal():
    grasps = grasps_at([0.0, 2.0, 4.0, 6.0], [0.0] * 4)
    out = smooth_scores(np.full(4, 0.6), grasps)
    assert np.allclose(out, 0.6, atol=1e-15)


def test_smoothed_never_exceeds_original():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-20, 20, 40)
    ys = rng.uniform(-20, 20, 40)
    scores = rng.random(40)
    out = smooth_scores(scores, grasps_at(xs, ys))
    assert (out <= scores + 1e-12).all()


def test_rotation_gate():
    # Same spot, orientations 10 deg apart: not neighbors.
    q0 = np.array([1.0, 0.0, 0.0, 0.0])
    q10 = np.array([np.cos(np.deg2rad(5.0)), 0.0, 0.0, np.sin(np.deg2rad(5.0))])
    lib = make_library([(0, 0, 0), (0, 0, 0)],
                       one_hot_descriptors(2, 4), one_hot_descriptors(2, 4),
                       [10.0, 10.0], quats=[q0, q10],
                       gripper_xy=[(0, 0), (0, 0)])
    out = smooth_scores(np.array([1.0, 0.0]), lib.grasps)
    assert out[0] == 1.0


# --- expectation ----------------------------------------------------------------

def test_expected_quality_delta_and_uniform():
    scores = np.array([0.1, 0.9, 0.4, 0.6])
    delta = np.zeros(4)
    delta[1] = 1.0
    assert expected_quality(scores, PoseDistribution(delta)) == 0.9
    assert abs(expected_quality(scores, PoseDistribution.uniform(4))
               - scores.mean()) < 1e-15


def test_expected_quality_brute_force():
    rng = np.random.default_rng(8)
    scores = rng.random(64)
    p = rng.random(64) + 1e-9
    p /= p.sum()
    dist = PoseDistribution(p)
    brute = sum(scores[i] * p[i] for i in range(64))
    assert abs(expected_quality(scores, dist) - brute) < 1e-12


def test_expected_quality_monotone():
    rng = np.random.default_rng(9)
    scores = rng.random(16)
    p = rng.random(16) + 0.01
    p /= p.sum()
    dist = PoseDistribution(p)
    base = expected_quality(scores, dist)
    bumped = scores.copy()
    bumped[7] += 0.05
    assert expected_quality(bumped, dist) > base


def test_translationally_ambiguous_region_not_observable(rod_runtime):
    # Mid-section grasps of the slim rod slide freely to the touch and sit
    # away from overhead landmarks: their own observations cannot pin
    # them, while grasps on the keyed paddle are identifiable.
    lib = rod_runtime.library
    obs = lib.scores["observability"]
    xs = np.array([g.gripper_in_table.trans[0] for g in lib.grasps])
    mid = (xs > 12.0) & (xs < 18.0)   # no landmark reaches this strip
    paddle = xs < -15.0
    assert mid.sum() > 20 and paddle.sum() > 20
    assert obs[mid].mean() <= 0.2
    assert obs[paddle].mean() >= 0.8
