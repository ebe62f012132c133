"""Pure-numpy kernel backend.

Ray casting brute-forces all triangles in memory-bounded chunks (the BVH
arrays are accepted and ignored), so results match the JIT backend exactly
while staying dependency-free. Intended for small workloads and as a
reference oracle.
"""

import numpy as np

_EDGE_TOL = 1e-9
_T_MIN = 1e-9
_PAR_EPS = 1e-12


def cast_rays(origins, dirs, verts, tris, nodes_min, nodes_max, nodes_left,
              nodes_right, nodes_start, nodes_count, tri_order):
    origins = np.asarray(origins, dtype=np.float64)
    dirs = np.asarray(dirs, dtype=np.float64)
    nray = len(origins)
    ntri = len(tris)
    t_out = np.full(nray, np.inf)
    id_out = np.full(nray, -1, dtype=np.int64)
    if ntri == 0 or nray == 0:
        return t_out, id_out

    v0 = verts[tris[:, 0]]
    e1 = verts[tris[:, 1]] - v0
    e2 = verts[tris[:, 2]] - v0

    chunk = max(1, int(4_000_000 // max(ntri, 1)))
    for lo in range(0, nray, chunk):
        hi = min(lo + chunk, nray)
        o = origins[lo:hi, None, :]            # (R,1,3)
        d = dirs[lo:hi, None, :]
        p = np.cross(d, e2[None, :, :])        # (R,T,3)
        det = np.einsum("rtk,tk->rt", p, e1)
        ok = np.abs(det) > _PAR_EPS
        inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
        s = o - v0[None, :, :]
        u = np.einsum("rtk,rtk->rt", s, p) * inv
        q = np.cross(s, e1[None, :, :])
        v = np.einsum("rtk,rtk->rt", d, q) * inv
        t = np.einsum("tk,rtk->rt", e2, q) * inv
        ok &= (u >= -_EDGE_TOL) & (v >= -_EDGE_TOL) & (u + v <= 1.0 + _EDGE_TOL)
        ok &= t > _T_MIN
        t = np.where(ok, t, np.inf)
        best = np.argmin(t, axis=1)
        rows = np.arange(hi - lo)
        tb = t[rows, best]
        t_out[lo:hi] = tb
        id_out[lo:hi] = np.where(np.isfinite(tb), best, -1)
    return t_out, id_out


def _project_tris(pts, axis):
    d = pts @ axis
    return d.min(axis=1), d.max(axis=1)


def boxes_hit_mesh(centers, axes, half, verts, tris):
    """For each oriented box, True if any mesh triangle overlaps it (SAT)."""
    centers = np.asarray(centers, dtype=np.float64)
    axes = np.asarray(axes, dtype=np.float64)
    half = np.asarray(half, dtype=np.float64)
    tri_pts = np.asarray(verts, dtype=np.float64)[np.asarray(tris, dtype=np.int64)]
    out = np.zeros(len(centers), dtype=bool)
    for b in range(len(centers)):
        out[b] = _box_tris_any(centers[b], axes[b], half[b], tri_pts)
    return out


def _box_tris_any(c, ax, h, tri_pts):
    # Triangle vertices in box frame.
    rel = tri_pts - c
    local = np.einsum("tvk,ak->tva", rel, ax)   # (T,3,3): vert coords on axes
    alive = np.ones(len(tri_pts), dtype=bool)
    # Box face axes: AABB test in box frame.
    for a in range(3):
        mn = local[:, :, a].min(axis=1)
        mx = local[:, :, a].max(axis=1)
        alive &= (mn <= h[a]) & (mx >= -h[a])
    if not alive.any():
        return False
    loc = local[alive]
    # Triangle normal axis.
    f0 = loc[:, 1] - loc[:, 0]
    f1 = loc[:, 2] - loc[:, 1]
    n = np.cross(f0, f1)
    r = np.abs(n) @ h
    d = np.einsum("tk,tk->t", n, loc[:, 0])
    keep = np.abs(d) <= r + 1e-12
    if not keep.any():
        return False
    loc = loc[keep]
    # 9 edge cross axes: cross(e_i, f_j) with e_i the box frame unit vectors.
    f = np.stack([loc[:, 1] - loc[:, 0],
                  loc[:, 2] - loc[:, 1],
                  loc[:, 0] - loc[:, 2]], axis=1)   # (T,3,3)
    alive2 = np.ones(len(loc), dtype=bool)
    for i in range(3):
        for j in range(3):
            axv = np.zeros((len(loc), 3))
            # cross(e_i, f_j): components of f rotated
            fj = f[:, j]
            if i == 0:
                axv[:, 1] = -fj[:, 2]
                axv[:, 2] = fj[:, 1]
            elif i == 1:
                axv[:, 0] = fj[:, 2]
                axv[:, 2] = -fj[:, 0]
            else:
                axv[:, 0] = -fj[:, 1]
                axv[:, 1] = fj[:, 0]
            pr = np.einsum("tvk,tk->tv", loc, axv)
            rad = np.abs(axv) @ h
            mn = pr.min(axis=1)
            mx = pr.max(axis=1)
            alive2 &= (mn <= rad + 1e-12) & (mx >= -rad - 1e-12)
            if not alive2.any():
                return False
    return bool(alive2.any())


def obb_pair_gap(ca, aa, ha, cb, ab, hb):
    """Max separation over the 15 SAT axes for each box pair.

    Positive: disjoint, value is a lower bound on the pair distance.
    Non-positive: overlapping (most negative over axes of the overlap).
    """
    ca = np.asarray(ca, dtype=np.float64)
    cb = np.asarray(cb, dtype=np.float64)
    aa = np.asarray(aa, dtype=np.float64)
    ab = np.asarray(ab, dtype=np.float64)
    ha = np.asarray(ha, dtype=np.float64)
    hb = np.asarray(hb, dtype=np.float64)
    n = len(ca)
    d = cb - ca
    gaps = np.full(n, -np.inf)

    def sep(axis_vec):
        # axis_vec: (n,3), may be unnormalized; zero-length axes skipped.
        ln = np.linalg.norm(axis_vec, axis=1)
        ok = ln > 1e-9
        axn = np.where(ok[:, None], axis_vec / np.where(ok, ln, 1.0)[:, None], 0.0)
        ra = (np.abs(np.einsum("nik,nk->ni", aa, axn)) * ha).sum(axis=1)
        rb = (np.abs(np.einsum("nik,nk->ni", ab, axn)) * hb).sum(axis=1)
        s = np.abs(np.einsum("nk,nk->n", d, axn)) - (ra + rb)
        return np.where(ok, s, -np.inf)

    for i in range(3):
        gaps = np.maximum(gaps, sep(aa[:, i]))
        gaps = np.maximum(gaps, sep(ab[:, i]))
    for i in range(3):
        for j in range(3):
            gaps = np.maximum(gaps, sep(np.cross(aa[:, i], ab[:, j])))
    return gaps
