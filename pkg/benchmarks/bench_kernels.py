#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-numpy fallback.

The fallback computes identical results (see tests/test_kernels.py); this
script shows what the `PICKPLACE_NUMBA=0` escape hatch costs. Run:

    python benchmarks/bench_kernels.py [--rays N] [--pairs N]
"""

import argparse
import time

import numpy as np

from pickplace.geometry.primitives import icosphere
from pickplace.kernels import build_bvh, numpy_impl

try:
    from pickplace.kernels import numba_impl
except ImportError:
    numba_impl = None


def timer(fn, *args, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def rotations(rng, n):
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
        np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
        np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
    ], 1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rays", type=int, default=200_000)
    parser.add_argument("--boxes", type=int, default=2_000)
    parser.add_argument("--pairs", type=int, default=200_000)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    mesh = icosphere(10.0, 3)
    bvh = build_bvh(mesh.vertices, mesh.triangles)
    origins = rng.uniform(-15, 15, (args.rays, 3))
    origins[:, 2] = 40.0
    dirs = np.tile([0.0, 0.0, -1.0], (args.rays, 1))
    ray_args = (origins, dirs, mesh.vertices, mesh.triangles, *bvh)

    centers = rng.uniform(-12, 12, (args.boxes, 3))
    axes = rotations(rng, args.boxes)
    half = rng.uniform(0.5, 5.0, (args.boxes, 3))
    box_args = (centers, axes, half, mesh.vertices, mesh.triangles)

    ca = rng.uniform(-10, 10, (args.pairs, 3))
    cb = rng.uniform(-10, 10, (args.pairs, 3))
    aa = rotations(rng, args.pairs)
    ab = rotations(rng, args.pairs)
    ha = rng.uniform(0.5, 4.0, (args.pairs, 3))
    hb = rng.uniform(0.5, 4.0, (args.pairs, 3))
    pair_args = (ca, aa, ha, cb, ab, hb)

    rows = []
    for name, np_fn, jit_fn, call_args, unit in (
        ("cast_rays", numpy_impl.cast_rays,
         None if numba_impl is None else numba_impl.cast_rays, ray_args,
         f"{args.rays} rays vs {len(mesh.triangles)} tris"),
        ("boxes_hit_mesh", numpy_impl.boxes_hit_mesh,
         None if numba_impl is None else numba_impl.boxes_hit_mesh, box_args,
         f"{args.boxes} boxes vs {len(mesh.triangles)} tris"),
        ("obb_pair_gap", numpy_impl.obb_pair_gap,
         None if numba_impl is None else numba_impl.obb_pair_gap, pair_args,
         f"{args.pairs} box pairs"),
    ):
        t_np = timer(np_fn, *call_args)
        if jit_fn is not None:
            jit_fn(*call_args)   # compile outside the timer
            t_jit = timer(jit_fn, *call_args)
            rows.append((name, unit, t_np, t_jit, t_np / t_jit))
        else:
            rows.append((name, unit, t_np, float("nan"), float("nan")))

    print(f"{'kernel':16} {'workload':34} {'numpy':>9} {'numba':>9} {'speedup':>8}")
    for name, unit, t_np, t_jit, speed in rows:
        print(f"{name:16} {unit:34} {t_np:8.3f}s {t_jit:8.3f}s {speed:7.1f}x")
    if numba_impl is None:
        print("numba unavailable: fallback timings only")


if __name__ == "__main__":
    main()
