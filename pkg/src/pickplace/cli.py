"""Command-line interface: init, precompute, inspect, evaluate.

Exit status is 0 only when all requested work completed; on failure a
machine-readable JSON error goes to stderr and the status is nonzero.
"""

import json
import os
import sys

import click
import numpy as np

from .config import ProjectConfig
from .errors import PickPlaceError, UnknownGraspId
from .pipeline import cache_dir_for, load_runtime, precompute
from .sim.batch import run_batch
from .sim.episode import METHODS

_METHOD_ALIASES = {
    "simple": "simple", "agnostic": "agnostic",
    "tactile_only": "tactile_only", "tactileonly": "tactile_only",
    "vision_only": "vision_only", "visiononly": "vision_only",
    "all": "all",
}


def _fail(stage, exc):
    payload = {"error": type(exc).__name__, "stage": stage, "message": str(exc)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(1)


def _load_config(path, object_spec=None):
    cfg = ProjectConfig.load(path)
    if object_spec:
        cfg.mesh.path = object_spec
        cfg.object_name = ""
    return cfg


@click.group()
def main():
    """Simulation pipeline for precise pick-and-place evaluation."""


@main.command()
@click.option("--out", default="pickplace.json", show_default=True,
              help="Where to write the config.")
@click.option("--object", "object_spec", default=None,
              help="Mesh path or builtin:<name> to preset.")
def init(out, object_spec):
    """Write a config file with the full default parameter set."""
    cfg = ProjectConfig()
    if object_spec:
        cfg.mesh.path = object_spec
    cfg.save(out)
    click.echo(f"wrote {out}")


@main.command("precompute")
@click.option("--config", "config_path", required=True)
@click.option("--object", "object_spec", default=None,
              help="Override the config's mesh (path or builtin:<name>).")
def precompute_cmd(config_path, object_spec):
    """Build the grasp library, edge cache, and quality scores."""
    try:
        cfg = _load_config(config_path, object_spec)
        status = precompute(cfg, log=lambda m: click.echo(f"  {m}"))
    except (PickPlaceError, ValueError, OSError) as e:
        _fail("precompute", e)
    click.echo(json.dumps({"object": cfg.name(), "stages": status}))


@main.command()
@click.option("--config", "config_path", required=True)
@click.option("--object", "object_spec", default=None)
@click.option("--grasp", "grasp_id", default="summary", show_default=True,
              help="A grasp id, or 'summary'.")
@click.option("--out", default=None, help="Directory for PNG exports.")
def inspect(config_path, object_spec, grasp_id, out):
    """Dump library statistics or export one grasp's panels as PNGs."""
    try:
        cfg = _load_config(config_path, object_spec)
        runtime = load_runtime(cfg)
        lib = runtime.library
        if grasp_id == "summary":
            scores = lib.scores
            edges = runtime.edge_cache.feasible
            density = float(edges.mean()) if edges.size else 0.0
            click.echo(f"object: {cfg.name()}")
            click.echo(f"table grasps: {len(lib)}")
            click.echo(f"in-air grasps: {len(runtime.in_air)}")
            click.echo(f"edge density: {density:.4f}")
            click.echo(f"betas: depth={lib.beta_depth:.4f} "
                       f"tactile={lib.beta_tactile:.4f}")
            for name in ("graspability", "observability", "manipulability",
                         "composite", "smoothed"):
                vec = scores.get(name)
                if vec is None:
                    continue
                hist, _ = np.histogram(vec, bins=5, range=(0.0, 1.0))
                click.echo(f"{name:15s} mean={float(np.mean(vec)):.3f} "
                           f"hist[0..1]={hist.tolist()}")
        else:
            gid = int(grasp_id)
            grasp = lib.grasp(gid)
            out_dir = out or cache_dir_for(cfg)
            os.makedirs(out_dir, exist_ok=True)
            _export_grasp_panels(cfg, runtime, gid, out_dir)
            scores = {k: float(v[gid]) for k, v in lib.scores.items()}
            click.echo(json.dumps({"id": gid, "width_mm": float(lib.widths[gid]),
                                   "perturbation": list(grasp.perturbation),
                                   "scores": scores}, indent=1))
    except (PickPlaceError, ValueError, OSError) as e:
        _fail("inspect", e)


def _export_grasp_panels(cfg, runtime, gid, out_dir):
    from PIL import Image, ImageDraw

    directory = cache_dir_for(cfg)
    lib = runtime.library
    crop_png = os.path.join(directory, "crops", f"c{gid:05d}.png")
    mask_a = os.path.join(directory, "masks", f"m{gid:05d}_a.png")
    mask_b = os.path.join(directory, "masks", f"m{gid:05d}_b.png")
    for src, name in ((crop_png, "crop.png"), (mask_a, "mask_a.png"),
                      (mask_b, "mask_b.png")):
        if not os.path.exists(src):
            raise UnknownGraspId(f"no cached render for grasp {gid}")
        Image.open(src).save(os.path.join(out_dir, f"grasp{gid:05d}_{name}"))
    card = Image.new("L", (360, 120), color=255)
    draw = ImageDraw.Draw(card)
    lines = [f"grasp {gid}  width {lib.widths[gid]:.2f} mm"]
    for k in ("graspability", "observability", "manipulability", "composite",
              "smoothed"):
        if k in lib.scores:
            lines.append(f"{k}: {lib.scores[k][gid]:.3f}")
    draw.text((8, 8), "\n".join(lines), fill=0)
    card.save(os.path.join(out_dir, f"grasp{gid:05d}_scores.png"))
    click.echo(f"exported 4 PNGs to {out_dir}")


@main.command()
@click.option("--config", "config_path", required=True)
@click.option("--object", "object_spec", default=None)
@click.option("--method", "methods", multiple=True,
              help="simple | agnostic | tactile_only | vision_only | all "
                   "(repeatable). Default: all.")
@click.option("--trials", default=0, show_default=True,
              help="Use the first N seeds from the config (0 = all).")
@click.option("--seed-file", default=None,
              help="Text file with one seed per line (overrides config seeds).")
@click.option("--out", default="reports", show_default=True)
def evaluate(config_path, object_spec, methods, trials, seed_file, out):
    """Run seeded episodes per method and emit CSV/JSON reports."""
    try:
        cfg = _load_config(config_path, object_spec)
        runtime = load_runtime(cfg)
        chosen = []
        for m in methods or ("all",):
            key = _METHOD_ALIASES.get(m.lower().replace("-", "_"))
            if key is None:
                raise ValueError(f"unknown method '{m}'")
            if key == "all":
                chosen = list(METHODS)
                break
            chosen.append(key)
        if seed_file:
            with open(seed_file) as f:
                seeds = [int(line) for line in f if line.strip()]
        else:
            seeds = list(cfg.sim.seeds)
        if trials:
            seeds = seeds[:trials]
        if not seeds:
            raise ValueError("no seeds selected")
        os.makedirs(out, exist_ok=True)
        report = run_batch(runtime, chosen, seeds,
                           log=lambda m: click.echo(f"  {m}"))
        base = os.path.join(out, cfg.name())
        report.write_episode_csv(base + "_episodes.csv")
        report.write_summary_csv(base + "_summary.csv")
        report.write_json(base + "_records.json")
        click.echo(f"wrote {base}_episodes.csv, {base}_summary.csv, "
                   f"{base}_records.json")
    except (PickPlaceError, ValueError, OSError) as e:
        _fail("evaluate", e)


if __name__ == "__main__":
    main()
