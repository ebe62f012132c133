"""Pose distributions over the table-grasp set and their fusion.

Each observation modality yields a softmax distribution over the library;
modalities combine by elementwise product with renormalization. A product
that sums to zero signals contradictory observations (DegenerateFusion);
the caller falls back to the vision-only distribution.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateFusion, EmptyLibrary
from .descriptors import pairwise_distances

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class PoseDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or len(p) == 0:
            raise ValueError("probs must be a non-empty vector")
        if (p < 0).any():
            raise ValueError("negative probability")
        s = p.sum()
        if abs(s - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities sum to {s}, not 1")
        object.__setattr__(self, "probs", p)

    @staticmethod
    def uniform(n):
        return PoseDistribution(np.full(n, 1.0 / n))

    @staticmethod
    def from_scores(logits):
        """Normalized exp(logits), computed stably."""
        logits = np.asarray(logits, dtype=np.float64)
        z = np.exp(logits - logits.max())
        return PoseDistribution(z / z.sum())

    def argmax(self):
        """Index of the most likely grasp; ties break to the lowest index."""
        return int(np.argmax(self.probs))

    def top_k(self, k):
        k = min(k, len(self.probs))
        # Sort by (-prob, index) so exact ties break to the lowest index.
        order = np.lexsort((np.arange(len(self.probs)), -self.probs))
        return order[:k]

    def entropy(self):
        p = self.probs[self.probs > 0]
        return float(-(p * np.log(p)).sum())


def match_distribution(descriptor, library_descriptors, beta, lib_norms2=None):
    """probs proportional to exp(-beta * distance to each library entry)."""
    lib = np.asarray(library_descriptors, dtype=np.float64)
    if lib.ndim != 2 or len(lib) == 0:
        raise EmptyLibrary("no descriptors for this modality")
    d = pairwise_distances(descriptor[None, :], lib, b_norms2=lib_norms2)[0]
    return PoseDistribution.from_scores(-float(beta) * d)


def width_factor(measured_width, library_widths, sigma):
    """Gaussian over the library grasp widths, centered at the measurement."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    w = np.asarray(library_widths, dtype=np.float64)
    return PoseDistribution.from_scores(-((w - measured_width) ** 2)
                                        / (2.0 * sigma * sigma))


def fuse(dists):
    """Elementwise product of distributions, renormalized."""
    if not dists:
        raise ValueError("nothing to fuse")
    n = len(dists[0].probs)
    prod = np.ones(n)
    for d in dists:
        if len(d.probs) != n:
            raise ValueError("distributions index different grasp sets")
        prod = prod * d.probs
    total = prod.sum()
    if total <= 0.0:
        raise DegenerateFusion("fused distribution sums to zero")
    return PoseDistribution(prod / total)


@dataclass
class Observation:
    depth_crop: object = None        # DepthImage
    contacts: object = None          # ContactMask
    gripper_width: float = None
    # Precomputed descriptors may stand in for the images.
    depth_descriptor: np.ndarray = None
    tactile_descriptor: np.ndarray = None

    def __post_init__(self):
        present = [self.depth_crop is not None or self.depth_descriptor is not None,
                   self.contacts is not None or self.tactile_descriptor is not None,
                   self.gripper_width is not None]
        if not any(present):
            raise ValueError("observation needs at least one modality")


def _modality_cache(library, modality):
    """Cached float64 descriptors and their squared norms, built once."""
    attr = f"_match_cache_{modality}"
    cached = getattr(library, attr, None)
    if cached is None:
        raw = (library.depth_descriptors if modality == "depth"
               else library.tactile_descriptors)
        desc = np.asarray(raw, dtype=np.float64)
        cached = (desc, (desc * desc).sum(axis=1))
        try:
            setattr(library, attr, cached)
        except AttributeError:   # frozen stand-ins in tests
            pass
    return cached


@dataclass
class PoseEstimate:
    distribution: PoseDistribution
    best_index: int
    best_grasp: object
    fusion_fallback: bool = False
    factors: dict = field(default_factory=dict)


def estimate_pose(obs, library, width_sigma=1.0):
    """Fuse whichever modalities the observation carries and pick the argmax.

    The modality subset realizes the ablation baselines through one code
    path: vision-only, tactile-only, or the full product including the
    gripper-width factor. On DegenerateFusion the result falls back to the
    vision-only distribution (or uniform without vision) with a warning flag.
    """
    from .descriptors import build_descriptor   # cycle guard

    factors = {}
    if obs.depth_descriptor is not None or obs.depth_crop is not None:
        desc = (obs.depth_descriptor if obs.depth_descriptor is not None
                else build_descriptor(obs.depth_crop, "depth"))
        lib_desc, norms2 = _modality_cache(library, "depth")
        factors["vision"] = match_distribution(desc, lib_desc,
                                               library.beta_depth,
                                               lib_norms2=norms2)
    if obs.tactile_descriptor is not None or obs.contacts is not None:
        desc = (obs.tactile_descriptor if obs.tactile_descriptor is not None
                else build_descriptor(obs.contacts, "tactile"))
        lib_desc, norms2 = _modality_cache(library, "tactile")
        factors["tactile"] = match_distribution(desc, lib_desc,
                                                library.beta_tactile,
                                                lib_norms2=norms2)
    if obs.gripper_width is not None:
        factors["width"] = width_factor(obs.gripper_width, library.widths,
                                        width_sigma)

    fallback = False
    try:
        dist = fuse(list(factors.values()))
    except DegenerateFusion:
        fallback = True
        if "vision" in factors:
            dist = factors["vision"]
        else:
            dist = PoseDistribution.uniform(len(library.grasps))
    best = dist.argmax()
    return PoseEstimate(dist, best, library.grasps[best], fallback, factors)
