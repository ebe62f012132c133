"""JIT kernel backend (numba @njit, cached).

Same contracts as ``numpy_impl``; ray casting traverses the packed BVH.
"""

import numpy as np
from numba import njit

_EDGE_TOL = 1e-9
_T_MIN = 1e-9
_PAR_EPS = 1e-12


@njit(cache=True)
def _ray_tri(ox, oy, oz, dx, dy, dz, v0, e1, e2):
    px = dy * e2[2] - dz * e2[1]
    py = dz * e2[0] - dx * e2[2]
    pz = dx * e2[1] - dy * e2[0]
    det = e1[0] * px + e1[1] * py + e1[2] * pz
    if abs(det) < _PAR_EPS:
        return np.inf
    inv = 1.0 / det
    sx = ox - v0[0]
    sy = oy - v0[1]
    sz = oz - v0[2]
    u = (sx * px + sy * py + sz * pz) * inv
    if u < -_EDGE_TOL or u > 1.0 + _EDGE_TOL:
        return np.inf
    qx = sy * e1[2] - sz * e1[1]
    qy = sz * e1[0] - sx * e1[2]
    qz = sx * e1[1] - sy * e1[0]
    v = (dx * qx + dy * qy + dz * qz) * inv
    if v < -_EDGE_TOL or u + v > 1.0 + _EDGE_TOL:
        return np.inf
    t = (e2[0] * qx + e2[1] * qy + e2[2] * qz) * inv
    if t <= _T_MIN:
        return np.inf
    return t


@njit(cache=True)
def cast_rays(origins, dirs, verts, tris, nodes_min, nodes_max, nodes_left,
              nodes_right, nodes_start, nodes_count, tri_order):
    nray = origins.shape[0]
    t_out = np.full(nray, np.inf)
    id_out = np.full(nray, -1, dtype=np.int64)
    if tris.shape[0] == 0:
        return t_out, id_out
    v0s = np.empty((tris.shape[0], 3))
    e1s = np.empty((tris.shape[0], 3))
    e2s = np.empty((tris.shape[0], 3))
    for i in range(tris.shape[0]):
        a = tris[i, 0]
        b = tris[i, 1]
        c = tris[i, 2]
        for k in range(3):
            v0s[i, k] = verts[a, k]
            e1s[i, k] = verts[b, k] - verts[a, k]
            e2s[i, k] = verts[c, k] - verts[a, k]

    stack = np.empty(128, dtype=np.int64)
    for r in range(nray):
        ox, oy, oz = origins[r, 0], origins[r, 1], origins[r, 2]
        dx, dy, dz = dirs[r, 0], dirs[r, 1], dirs[r, 2]
        ix = 1.0 / dx if dx != 0.0 else np.inf
        iy = 1.0 / dy if dy != 0.0 else np.inf
        iz = 1.0 / dz if dz != 0.0 else np.inf
        best_t = np.inf
        best_i = -1
        top = 0
        stack[top] = 0
        top += 1
        while top > 0:
            top -= 1
            node = stack[top]
            # Slab test against current best.
            tmin = 0.0
            tmax = best_t
            t1 = (nodes_min[node, 0] - ox) * ix
            t2 = (nodes_max[node, 0] - ox) * ix
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            t1 = (nodes_min[node, 1] - oy) * iy
            t2 = (nodes_max[node, 1] - oy) * iy
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            t1 = (nodes_min[node, 2] - oz) * iz
            t2 = (nodes_max[node, 2] - oz) * iz
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
            if tmin > tmax:
                continue
            cnt = nodes_count[node]
            if cnt > 0:
                s = nodes_start[node]
                for k in range(cnt):
                    ti = tri_order[s + k]
                    t = _ray_tri(ox, oy, oz, dx, dy, dz, v0s[ti], e1s[ti], e2s[ti])
                    if t < best_t:
                        best_t = t
                        best_i = ti
            else:
                stack[top] = nodes_left[node]
                top += 1
                stack[top] = nodes_right[node]
                top += 1
        t_out[r] = best_t
        id_out[r] = best_i
    return t_out, id_out


@njit(cache=True)
def _box_tri_overlap(c, ax, h, p0, p1, p2):
    # Work in box frame.
    l0 = np.empty(3)
    l1 = np.empty(3)
    l2 = np.empty(3)
    for a in range(3):
        l0[a] = (p0[0] - c[0]) * ax[a, 0] + (p0[1] - c[1]) * ax[a, 1] + (p0[2] - c[2]) * ax[a, 2]
        l1[a] = (p1[0] - c[0]) * ax[a, 0] + (p1[1] - c[1]) * ax[a, 1] + (p1[2] - c[2]) * ax[a, 2]
        l2[a] = (p2[0] - c[0]) * ax[a, 0] + (p2[1] - c[1]) * ax[a, 1] + (p2[2] - c[2]) * ax[a, 2]
    for a in range(3):
        mn = min(l0[a], min(l1[a], l2[a]))
        mx = max(l0[a], max(l1[a], l2[a]))
        if mn > h[a] or mx < -h[a]:
            return False
    f0 = l1 - l0
    f1 = l2 - l1
    f2 = l0 - l2
    nx = f0[1] * f1[2] - f0[2] * f1[1]
    ny = f0[2] * f1[0] - f0[0] * f1[2]
    nz = f0[0] * f1[1] - f0[1] * f1[0]
    r = abs(nx) * h[0] + abs(ny) * h[1] + abs(nz) * h[2]
    d = nx * l0[0] + ny * l0[1] + nz * l0[2]
    if abs(d) > r + 1e-12:
        return False
    # 9 cross axes of box unit vectors with triangle edges.
    for i in range(3):
        for fidx in range(3):
            if fidx == 0:
                fv = f0
            elif fidx == 1:
                fv = f1
            else:
                fv = f2
            if i == 0:
                a0, a1, a2 = 0.0, -fv[2], fv[1]
            elif i == 1:
                a0, a1, a2 = fv[2], 0.0, -fv[0]
            else:
                a0, a1, a2 = -fv[1], fv[0], 0.0
            pr0 = l0[0] * a0 + l0[1] * a1 + l0[2] * a2
            pr1 = l1[0] * a0 + l1[1] * a1 + l1[2] * a2
            pr2 = l2[0] * a0 + l2[1] * a1 + l2[2] * a2
            rad = abs(a0) * h[0] + abs(a1) * h[1] + abs(a2) * h[2]
            mn = min(pr0, min(pr1, pr2))
            mx = max(pr0, max(pr1, pr2))
            if mn > rad + 1e-12 or mx < -rad - 1e-12:
                return False
    return True


@njit(cache=True)
def boxes_hit_mesh(centers, axes, half, verts, tris):
    nbox = centers.shape[0]
    out = np.zeros(nbox, dtype=np.bool_)
    for b in range(nbox):
        for t in range(tris.shape[0]):
            if _box_tri_overlap(centers[b], axes[b], half[b],
                                verts[tris[t, 0]], verts[tris[t, 1]], verts[tris[t, 2]]):
                out[b] = True
                break
    return out


@njit(cache=True)
def obb_pair_gap(ca, aa, ha, cb, ab, hb):
    n = ca.shape[0]
    gaps = np.full(n, -np.inf)
    for p in range(n):
        dx = cb[p, 0] - ca[p, 0]
        dy = cb[p, 1] - ca[p, 1]
        dz = cb[p, 2] - ca[p, 2]
        best = -np.inf
        for src in range(15):
            if src < 3:
                lx, ly, lz = aa[p, src, 0], aa[p, src, 1], aa[p, src, 2]
            elif src < 6:
                lx, ly, lz = ab[p, src - 3, 0], ab[p, src - 3, 1], ab[p, src - 3, 2]
            else:
                i = (src - 6) // 3
                j = (src - 6) % 3
                ux, uy, uz = aa[p, i, 0], aa[p, i, 1], aa[p, i, 2]
                vx, vy, vz = ab[p, j, 0], ab[p, j, 1], ab[p, j, 2]
                lx = uy * vz - uz * vy
                ly = uz * vx - ux * vz
                lz = ux * vy - uy * vx
            ln = (lx * lx + ly * ly + lz * lz) ** 0.5
            if ln < 1e-9:
                continue
            lx /= ln
            ly /= ln
            lz /= ln
            ra = 0.0
            rb = 0.0
            for i in range(3):
                ra += abs(aa[p, i, 0] * lx + aa[p, i, 1] * ly + aa[p, i, 2] * lz) * ha[p, i]
                rb += abs(ab[p, i, 0] * lx + ab[p, i, 1] * ly + ab[p, i, 2] * lz) * hb[p, i]
            s = abs(dx * lx + dy * ly + dz * lz) - (ra + rb)
            if s > best:
                best = s
        gaps[p] = best
    return gaps
