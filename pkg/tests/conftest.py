"""Session fixtures: precomputed runtimes shared across test modules."""

import pytest

from pickplace.config import ProjectConfig
from pickplace.graspgen.inair import InAirConfig
from pickplace.graspgen.table import PerturbationConfig, TableSamplingConfig
from pickplace.pipeline import load_runtime, precompute
from pickplace.sim.presets import preset_config


def mini_cube_config(cache_dir):
    """Small, fast library on the notched cube for unit tests."""
    import numpy as np

    from pickplace.geometry import compute_stable_poses
    from pickplace.sim.objects import builtin_mesh

    cfg = ProjectConfig()
    cfg.mesh.path = "builtin:notched_cube"
    cfg.cache_dir = str(cache_dir)
    stable = compute_stable_poses(builtin_mesh("notched_cube"))
    flat = next(i for i, sp in enumerate(stable)
                if sp.pose.rotate(np.array([0.0, 0.0, 1.0]))[2] > 0.99)
    cfg.table = TableSamplingConfig(grid_mm=1.0, yaw_step_deg=30.0,
                                    surface_samples=12000,
                                    stable_indices=(flat,))
    cfg.perturb = PerturbationConfig(angles_deg=(0.0,), heights_mm=(-0.2, 0.0, 0.2))
    cfg.inair = InAirConfig(max_grasps=60, surface_samples=10000)
    cfg.sim.spawn_stable_index = flat
    cfg.fixture.goal_stable_index = flat
    return cfg


@pytest.fixture(scope="session")
def mini_runtime(tmp_path_factory):
    cfg = mini_cube_config(tmp_path_factory.mktemp("mini_cache"))
    precompute(cfg)
    return load_runtime(cfg)


def _preset_runtime(name, tmp_path_factory):
    cfg = preset_config(name, cache_dir=str(tmp_path_factory.mktemp(f"{name}_cache")))
    precompute(cfg)
    return load_runtime(cfg)


@pytest.fixture(scope="session")
def rod_runtime(tmp_path_factory):
    return _preset_runtime("keyed_rod", tmp_path_factory)


@pytest.fixture(scope="session")
def block_runtime(tmp_path_factory):
    return _preset_runtime("stepped_block", tmp_path_factory)


@pytest.fixture(scope="session")
def cube_runtime(tmp_path_factory):
    return _preset_runtime("notched_cube", tmp_path_factory)


@pytest.fixture(scope="session")
def bracket_runtime(tmp_path_factory):
    return _preset_runtime("l_bracket", tmp_path_factory)
