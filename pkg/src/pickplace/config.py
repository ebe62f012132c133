"""Project configuration: every tunable in one JSON-serializable tree.

``pickplace init`` emits the full default set so runs are reproducible
from the config file alone. Each block hashes independently; cache stages
store the hashes of the blocks they depend on, which drives staged
invalidation.
"""

import hashlib
import json
from dataclasses import dataclass, field

from .graspgen.gripper import GripperModel
from .graspgen.inair import InAirConfig
from .graspgen.table import PerturbationConfig, TableSamplingConfig
from .quality import QualityConfig
from .render.noise import NoiseConfig

CONFIG_VERSION = 1


@dataclass
class MeshConfig:
    path: str = "builtin:notched_cube"
    scale: float = 1.0

    def to_dict(self):
        return {"path": self.path, "scale": self.scale}

    @staticmethod
    def from_dict(d):
        return MeshConfig(**d)


@dataclass
class RenderConfig:
    camera_height_mm: float = 500.0
    camera_fx: float = 600.0
    camera_width_px: int = 320
    camera_height_px: int = 240
    crop_px: int = 64
    sensor_mm_per_px: float = 0.2
    penetration_mm: float = 1.0

    def to_dict(self):
        return dict(self.__dict__)

    @staticmethod
    def from_dict(d):
        return RenderConfig(**d)

    def camera(self):
        from .render.camera import VirtualCamera

        return VirtualCamera.top_down(self.camera_height_mm, self.camera_fx,
                                      self.camera_width_px, self.camera_height_px)


@dataclass
class PerceptionConfig:
    beta_scale: float = 10.0          # softmax sharpness: scale / median distance
    beta_scale_tactile: float = -1.0  # override for tactile; -1 = use beta_scale
    beta_max_pairs: int = 2048
    width_sigma_mm: float = 1.0
    edt_clip_px: int = 6         # tactile distance-transform saturation

    def to_dict(self):
        return dict(self.__dict__)

    @staticmethod
    def from_dict(d):
        return PerceptionConfig(**d)

    def tactile_scale(self):
        return self.beta_scale if self.beta_scale_tactile < 0 else self.beta_scale_tactile


@dataclass
class FixtureConfig:
    cavity_depth_mm: float = 3.0
    radial_clearance_mm: float = 1.0
    goal_stable_index: int = 0
    goal_yaw_deg: float = 0.0

    def to_dict(self):
        return dict(self.__dict__)

    @staticmethod
    def from_dict(d):
        return FixtureConfig(**d)


@dataclass
class CandidateConfig:
    depth_edge_mm: float = 2.0        # gradient magnitude marking an edge
    stride_px: int = 2
    max_candidates: int = 48
    min_width_mm: float = 2.0
    finger_clear_mm: float = 1.5      # scene height allowed under a finger
    opposition_min: float = 0.85      # gradient anti-alignment gate

    def to_dict(self):
        return dict(self.__dict__)

    @staticmethod
    def from_dict(d):
        return CandidateConfig(**d)


@dataclass
class SimConfig:
    spawn_stable_index: int = -1      # -1 = sample by stable-pose weight
    spawn_xy_mm: float = 25.0
    perturb_sigma_mm: float = 0.5
    perturb_sigma_deg: float = 1.0
    handoff_sigma_mm: float = 0.25
    handoff_sigma_deg: float = 0.5
    held_min_graspability: float = 0.05
    success_trans_mm: float = 1.0
    success_rot_deg: float = 3.0
    near_success_mm: float = 5.0
    localization_add_mm: float = 5.0
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    candidates: CandidateConfig = field(default_factory=CandidateConfig)
    seeds: tuple = tuple(range(20))

    def to_dict(self):
        d = dict(self.__dict__)
        d["noise"] = self.noise.to_dict()
        d["candidates"] = self.candidates.to_dict()
        d["seeds"] = list(self.seeds)
        return d

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d["noise"] = NoiseConfig.from_dict(d["noise"])
        d["candidates"] = CandidateConfig.from_dict(d["candidates"])
        d["seeds"] = tuple(d["seeds"])
        return SimConfig(**d)


@dataclass
class ProjectConfig:
    mesh: MeshConfig = field(default_factory=MeshConfig)
    gripper: GripperModel = field(default_factory=GripperModel)
    table: TableSamplingConfig = field(default_factory=TableSamplingConfig)
    perturb: PerturbationConfig = field(default_factory=PerturbationConfig)
    inair: InAirConfig = field(default_factory=InAirConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    quality: QualityConfig = field(default_factory=QualityConfig)
    fixture: FixtureConfig = field(default_factory=FixtureConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    cache_dir: str = "cache"
    object_name: str = ""             # defaults to the mesh basename

    _BLOCKS = ("mesh", "gripper", "table", "perturb", "inair", "render",
               "perception", "quality", "fixture", "sim")

    def to_dict(self):
        return {
            "version": CONFIG_VERSION,
            "mesh": self.mesh.to_dict(),
            "gripper": self.gripper.to_dict(),
            "table": self.table.to_dict(),
            "perturb": self.perturb.to_dict(),
            "inair": self.inair.to_dict(),
            "render": self.render.to_dict(),
            "perception": self.perception.to_dict(),
            "quality": self.quality.to_dict(),
            "fixture": self.fixture.to_dict(),
            "sim": self.sim.to_dict(),
            "cache_dir": self.cache_dir,
            "object_name": self.object_name,
        }

    @staticmethod
    def from_dict(d):
        return ProjectConfig(
            mesh=MeshConfig.from_dict(d["mesh"]),
            gripper=GripperModel.from_dict(d["gripper"]),
            table=TableSamplingConfig.from_dict(d["table"]),
            perturb=PerturbationConfig.from_dict(d["perturb"]),
            inair=InAirConfig.from_dict(d["inair"]),
            render=RenderConfig.from_dict(d["render"]),
            perception=PerceptionConfig.from_dict(d["perception"]),
            quality=QualityConfig.from_dict(d["quality"]),
            fixture=FixtureConfig.from_dict(d["fixture"]),
            sim=SimConfig.from_dict(d["sim"]),
            cache_dir=d.get("cache_dir", "cache"),
            object_name=d.get("object_name", ""),
        )

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @staticmethod
    def load(path):
        with open(path) as f:
            return ProjectConfig.from_dict(json.load(f))

    def block_hash(self, name):
        block = getattr(self, name)
        payload = json.dumps(block.to_dict(), sort_keys=True)
        return hashlib.sha256(f"{name}:{payload}".encode()).hexdigest()[:16]

    def name(self):
        if self.object_name:
            return self.object_name
        base = self.mesh.path.rsplit("/", 1)[-1]
        return base.replace("builtin:", "").rsplit(".", 1)[0]
