"""The grasp library: table grasps with their simulated observations.

On disk a library directory holds grasps.json, descriptors.bin, 16-bit
depth-crop PNGs under crops/, 1-bit mask PNGs under masks/, and
quality.csv once scores exist. descriptors.bin layout (little-endian):

    8 bytes   magic b"PPLIB\\x00\\x01\\x00"
    uint32    grasp count N
    uint32    depth descriptor dim Dd
    uint32    tactile descriptor dim Dt
    float32   N * Dd depth descriptors (row-major)
    float32   N * Dt tactile descriptors
    float64   N grasp widths (mm)
    float64   beta_depth, beta_tactile
"""

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import CacheInvalid, UnknownGraspId
from ..geometry.pointcloud import PointCloud, add_distance
from ..graspgen.table import TableGrasp
from ..render.images import ContactMask, DepthImage, load_mask_png, save_mask_png

_MAGIC = b"PPLIB\x00\x01\x00"


def calibrate_beta(descriptors, scale=10.0, max_pairs=2048, seed=0):
    """Softmax temperature: scale / median pairwise descriptor distance.

    The median is estimated on a seeded pair subsample for large sets.
    Returns 0.0 (uniform matching) when the descriptors are all identical.
    """
    from .descriptors import pairwise_distances

    desc = np.asarray(descriptors, dtype=np.float64)
    n = len(desc)
    if n < 2:
        return 0.0
    rng = np.random.Generator(np.random.Philox(seed))
    total_pairs = n * (n - 1) // 2
    if total_pairs <= max_pairs:
        d = pairwise_distances(desc, desc)
        vals = d[np.triu_indices(n, k=1)]
    else:
        i = rng.integers(0, n, size=max_pairs)
        j = rng.integers(0, n - 1, size=max_pairs)
        j = np.where(j >= i, j + 1, j)
        vals = np.linalg.norm(desc[i] - desc[j], axis=1)
    med = float(np.median(vals))
    if med <= 1e-12:
        return 0.0
    return scale / med


@dataclass
class GraspLibrary:
    grasps: list                                  # TableGrasp, ids = positions
    depth_descriptors: np.ndarray                 # (N, Dd) float32
    tactile_descriptors: np.ndarray               # (N, Dt) float32
    widths: np.ndarray                            # (N,) float64
    beta_depth: float
    beta_tactile: float
    cloud: PointCloud                             # object cloud for ADD
    crops: list = None                            # DepthImage per grasp
    masks: list = None                            # ContactMask per grasp
    scores: dict = field(default_factory=dict)    # per-grasp score arrays
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.grasps)
        for g, i in zip(self.grasps, range(n)):
            if g.id != i:
                raise ValueError("grasp ids must equal their library index")
        if len(self.depth_descriptors) != n or len(self.tactile_descriptors) != n:
            raise ValueError("one descriptor row per grasp required")

    def __len__(self):
        return len(self.grasps)

    def grasp(self, gid):
        if not 0 <= gid < len(self.grasps):
            raise UnknownGraspId(f"grasp id {gid} not in library of {len(self)}")
        return self.grasps[gid]

    @property
    def depth_descriptors64(self):
        """float64 view of the depth descriptors, converted once."""
        if not hasattr(self, "_depth64"):
            self._depth64 = np.asarray(self.depth_descriptors, dtype=np.float64)
        return self._depth64

    @property
    def tactile_descriptors64(self):
        if not hasattr(self, "_tactile64"):
            self._tactile64 = np.asarray(self.tactile_descriptors,
                                         dtype=np.float64)
        return self._tactile64

    def _pose_arrays(self):
        if not hasattr(self, "_rots"):
            self._rots = np.stack([g.object_in_gripper.rotation_matrix()
                                   for g in self.grasps])
            self._trans = np.stack([g.object_in_gripper.trans
                                    for g in self.grasps])
        return self._rots, self._trans

    def add_between(self, i, j):
        return add_distance(self.cloud, self.grasps[i].object_in_gripper,
                            self.grasps[j].object_in_gripper)

    def add_to_pose(self, i, pose):
        return add_distance(self.cloud, self.grasps[i].object_in_gripper, pose)

    def adds_to_pose(self, pose, chunk=256, max_points=None):
        """ADD from every library grasp to the given pose, vectorized.

        max_points caps the cloud size: a few hundred points rank nearest
        neighbors reliably at a fraction of the cost.
        """
        rots, trans = self._pose_arrays()
        pts = self.cloud.points
        if max_points and len(pts) > max_points:
            pts = pts[:max_points]
        target = pose.apply(pts)
        out = np.empty(len(self))
        for lo in range(0, len(self), chunk):
            hi = min(lo + chunk, len(self))
            moved = np.einsum("nij,pj->npi", rots[lo:hi], pts) \
                + trans[lo:hi, None, :]
            out[lo:hi] = np.linalg.norm(moved - target[None], axis=2).mean(axis=1)
        return out

    def nearest_index_to(self, pose):
        return int(np.argmin(self.adds_to_pose(pose, max_points=256)))

    def nn_spacing(self, i):
        """ADD to the closest other library grasp."""
        best = np.inf
        for j in range(len(self)):
            if j != i:
                best = min(best, self.add_between(i, j))
        return best

    # --- persistence ---------------------------------------------------------

    def save(self, directory):
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "grasps.json"), "w") as f:
            json.dump([g.to_dict() for g in self.grasps], f, indent=1)
        self._save_blob(os.path.join(directory, "descriptors.bin"))
        np.save(os.path.join(directory, "cloud.npy"), self.cloud.points)
        if self.crops is not None:
            cdir = os.path.join(directory, "crops")
            os.makedirs(cdir, exist_ok=True)
            for i, crop in enumerate(self.crops):
                crop.save_png(os.path.join(cdir, f"c{i:05d}.png"))
        if self.masks is not None:
            mdir = os.path.join(directory, "masks")
            os.makedirs(mdir, exist_ok=True)
            for i, cm in enumerate(self.masks):
                save_mask_png(cm.mask_a, os.path.join(mdir, f"m{i:05d}_a.png"))
                save_mask_png(cm.mask_b, os.path.join(mdir, f"m{i:05d}_b.png"))
        if self.scores:
            self._save_scores(os.path.join(directory, "quality.csv"))

    def _save_blob(self, path):
        dd = np.ascontiguousarray(self.depth_descriptors, dtype="<f4")
        td = np.ascontiguousarray(self.tactile_descriptors, dtype="<f4")
        w = np.ascontiguousarray(self.widths, dtype="<f8")
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<III", len(self.grasps), dd.shape[1], td.shape[1]))
            f.write(dd.tobytes())
            f.write(td.tobytes())
            f.write(w.tobytes())
            f.write(struct.pack("<dd", self.beta_depth, self.beta_tactile))

    def _save_scores(self, path):
        cols = ["graspability", "observability", "manipulability",
                "composite", "smoothed"]
        with open(path, "w") as f:
            f.write("id," + ",".join(cols) + "\n")
            for i in range(len(self)):
                row = [f"{self.scores[c][i]:.9f}" for c in cols]
                f.write(f"{i}," + ",".join(row) + "\n")

    @staticmethod
    def load(directory, with_images=False):
        gpath = os.path.join(directory, "grasps.json")
        bpath = os.path.join(directory, "descriptors.bin")
        if not (os.path.exists(gpath) and os.path.exists(bpath)):
            raise CacheInvalid(f"library files missing under {directory}")
        with open(gpath) as f:
            grasps = [TableGrasp.from_dict(d) for d in json.load(f)]
        with open(bpath, "rb") as f:
            blob = f.read()
        if blob[:8] != _MAGIC:
            raise CacheInvalid("descriptors.bin has a wrong magic header")
        n, dd_dim, td_dim = struct.unpack_from("<III", blob, 8)
        if n != len(grasps):
            raise CacheInvalid("descriptor count does not match grasps.json")
        off = 8 + 12
        dd = np.frombuffer(blob, dtype="<f4", count=n * dd_dim, offset=off)
        off += 4 * n * dd_dim
        td = np.frombuffer(blob, dtype="<f4", count=n * td_dim, offset=off)
        off += 4 * n * td_dim
        w = np.frombuffer(blob, dtype="<f8", count=n, offset=off)
        off += 8 * n
        beta_d, beta_t = struct.unpack_from("<dd", blob, off)
        cloud = PointCloud(np.load(os.path.join(directory, "cloud.npy")))
        crops = masks = None
        if with_images:
            crops = [DepthImage.load_png(os.path.join(directory, "crops", f"c{i:05d}.png"))
                     for i in range(n)]
            masks = [ContactMask(
                load_mask_png(os.path.join(directory, "masks", f"m{i:05d}_a.png")),
                load_mask_png(os.path.join(directory, "masks", f"m{i:05d}_b.png")))
                for i in range(n)]
        lib = GraspLibrary(grasps, dd.reshape(n, dd_dim).copy(),
                           td.reshape(n, td_dim).copy(), w.copy(),
                           beta_d, beta_t, cloud, crops, masks)
        qpath = os.path.join(directory, "quality.csv")
        if os.path.exists(qpath):
            lib.scores = _load_scores(qpath, n)
        return lib


def _load_scores(path, n):
    with open(path) as f:
        header = f.readline().strip().split(",")
        cols = {name: np.zeros(n) for name in header[1:]}
        for line in f:
            parts = line.strip().split(",")
            i = int(parts[0])
            for name, val in zip(header[1:], parts[1:]):
                cols[name][i] = float(val)
    return cols
