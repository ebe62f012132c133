"""Array-packed bounding volume hierarchy over mesh triangles.

Median-split build, deterministic for a given mesh. Nodes are stored as
flat arrays so both kernel backends can traverse them without objects.
"""

import numpy as np

LEAF_SIZE = 4


def build_bvh(verts, tris):
    """Build a BVH and return the packed arrays expected by ``cast_rays``.

    Returns (nodes_min, nodes_max, left, right, start, count, tri_order).
    Internal nodes have count == 0 and child indices in left/right; leaves
    have count > 0 and index tri_order[start:start+count].
    """
    verts = np.asarray(verts, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int64)
    ntri = len(tris)
    tri_pts = verts[tris]                      # (T, 3, 3)
    tri_min = tri_pts.min(axis=1)
    tri_max = tri_pts.max(axis=1)
    centroids = tri_pts.mean(axis=1)

    nodes_min, nodes_max = [], []
    left, right, start, count = [], [], [], []
    tri_order = np.arange(ntri, dtype=np.int64)

    def new_node():
        nodes_min.append(np.zeros(3))
        nodes_max.append(np.zeros(3))
        left.append(-1)
        right.append(-1)
        start.append(0)
        count.append(0)
        return len(left) - 1

    # Iterative build; stack of (node_index, lo, hi) over tri_order slices.
    root = new_node()
    stack = [(root, 0, ntri)]
    while stack:
        node, lo, hi = stack.pop()
        idx = tri_order[lo:hi]
        nodes_min[node] = tri_min[idx].min(axis=0)
        nodes_max[node] = tri_max[idx].max(axis=0)
        if hi - lo <= LEAF_SIZE:
            start[node] = lo
            count[node] = hi - lo
            continue
        extent = nodes_max[node] - nodes_min[node]
        axis = int(np.argmax(extent))
        order = np.argsort(centroids[idx, axis], kind="stable")
        tri_order[lo:hi] = idx[order]
        mid = lo + (hi - lo) // 2
        lc, rc = new_node(), new_node()
        left[node], right[node] = lc, rc
        stack.append((lc, lo, mid))
        stack.append((rc, mid, hi))

    return (
        np.asarray(nodes_min, dtype=np.float64),
        np.asarray(nodes_max, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(start, dtype=np.int64),
        np.asarray(count, dtype=np.int64),
        tri_order,
    )
