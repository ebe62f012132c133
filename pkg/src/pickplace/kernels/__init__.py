"""Numeric hot-loop kernels with two interchangeable backends.

The JIT backend (numba ``@njit``) is the default. Setting the environment
variable ``PICKPLACE_NUMBA=0`` before import selects the pure-numpy
fallback, which computes identical results without compilation. If numba
is not importable the fallback is selected automatically.

Both backends expose the same functions:

``cast_rays(origins, dirs, verts, tris, nodes_min, nodes_max, nodes_left,
nodes_right, nodes_start, nodes_count, tri_order) -> (t, tri_index)``
    Nearest-hit ray/mesh intersection. ``t`` is ``inf`` on miss.

``boxes_hit_mesh(centers, axes, half, verts, tris) -> bool array``
    Per-box triangle overlap test (separating axis).

``obb_pair_gap(ca, aa, ha, cb, ab, hb) -> float array``
    Separation of oriented box pairs over the 15 SAT axes; positive means
    disjoint (value is a lower bound on the true distance), non-positive
    means overlapping.

``benchmarks/bench_kernels.py`` compares the two backends.
"""

import os

from . import numpy_impl
from .bvh import build_bvh  # noqa: F401  (re-export)

_requested = os.environ.get("PICKPLACE_NUMBA", "1") != "0"
USING_NUMBA = False

if _requested:
    try:
        from . import numba_impl as _impl

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        _impl = numpy_impl
else:
    _impl = numpy_impl

cast_rays = _impl.cast_rays
boxes_hit_mesh = _impl.boxes_hit_mesh
obb_pair_gap = _impl.obb_pair_gap

BACKEND = "numba" if USING_NUMBA else "numpy"
