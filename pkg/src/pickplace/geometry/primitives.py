"""Procedural watertight meshes: boxes, voxel solids, spheres, cones.

Voxel solids (axis-aligned cells on a uniform grid) are the workhorse for
synthetic benchmark objects; their boundary is extracted with greedy
rectangle merging so triangle counts stay small.
"""

import numpy as np

from .mesh import TriMesh


def box_mesh(size, center=(0.0, 0.0, 0.0)):
    """Axis-aligned box; size = (sx, sy, sz) mm."""
    sx, sy, sz = [s / 2.0 for s in size]
    cx, cy, cz = center
    v = np.array([
        [-sx, -sy, -sz], [sx, -sy, -sz], [sx, sy, -sz], [-sx, sy, -sz],
        [-sx, -sy, sz], [sx, -sy, sz], [sx, sy, sz], [-sx, sy, sz],
    ]) + np.array([cx, cy, cz])
    quads = [
        (0, 3, 2, 1),  # -z
        (4, 5, 6, 7),  # +z
        (0, 1, 5, 4),  # -y
        (2, 3, 7, 6),  # +y
        (1, 2, 6, 5),  # +x
        (0, 4, 7, 3),  # -x
    ]
    tris = []
    for a, b, c, d in quads:
        tris.append([a, b, c])
        tris.append([a, c, d])
    return TriMesh(v, np.asarray(tris, dtype=np.int64))


def voxel_mesh(occupancy, cell_mm=1.0, origin=(0.0, 0.0, 0.0), center_com=False):
    """Boundary mesh of a 3D boolean occupancy grid.

    One quad per exposed cell face, with shared vertices, so the result is
    conforming, watertight, and outward-oriented. origin is the world
    position of grid corner (0, 0, 0).
    """
    occ = np.asarray(occupancy, dtype=bool)
    if not occ.any():
        raise ValueError("empty occupancy grid")
    nx, ny, nz = occ.shape
    padded = np.zeros((nx + 2, ny + 2, nz + 2), dtype=bool)
    padded[1:-1, 1:-1, 1:-1] = occ

    verts = {}
    tris = []

    def vid(ix, iy, iz):
        key = (ix, iy, iz)
        if key not in verts:
            verts[key] = len(verts)
        return verts[key]

    def emit_cell_face(axis, plane, u, v, positive):
        # np.take drops `axis`, leaving the remaining axes in sorted order.
        rem = [a for a in range(3) if a != axis]
        # CCW corners in the (rem[0], rem[1]) plane have normal along
        # rem[0] x rem[1], which is -axis for axis == 1.
        outward = positive ^ (axis == 1)
        corners2 = [(u, v), (u + 1, v), (u + 1, v + 1), (u, v + 1)]
        ids = []
        for (cu, cv) in corners2:
            coord = [0, 0, 0]
            coord[axis] = plane
            coord[rem[0]] = cu
            coord[rem[1]] = cv
            ids.append(vid(*coord))
        if outward:
            tris.append([ids[0], ids[1], ids[2]])
            tris.append([ids[0], ids[2], ids[3]])
        else:
            tris.append([ids[0], ids[2], ids[1]])
            tris.append([ids[0], ids[3], ids[2]])

    for axis in range(3):
        n_axis = padded.shape[axis]
        for positive in (True, False):
            shifted = np.roll(padded, -1 if positive else 1, axis=axis)
            exposed = padded & ~shifted
            for plane_cell in range(n_axis):
                face2d = np.take(exposed, plane_cell, axis=axis)
                if not face2d.any():
                    continue
                plane = plane_cell + (1 if positive else 0)
                for u, v in zip(*np.nonzero(face2d)):
                    emit_cell_face(axis, plane - 1, int(u) - 1, int(v) - 1,
                                   positive)

    ids_sorted = sorted(verts.items(), key=lambda kv: kv[1])
    coords = np.array([k for k, _ in ids_sorted], dtype=np.float64)
    coords = coords * cell_mm + np.asarray(origin, dtype=np.float64)
    mesh = TriMesh(coords, np.asarray(tris, dtype=np.int64))
    if center_com:
        mesh = TriMesh(mesh.vertices - mesh.com, mesh.triangles)
    return mesh


def solid_from_boxes(include, exclude=(), cell_mm=2.0, center_com=True):
    """Voxel solid from axis-aligned mm boxes: union(include) minus union(exclude).

    Each box is ((x0, y0, z0), (x1, y1, z1)) on the cell grid.
    """
    include = [np.asarray(b, dtype=np.float64) for b in include]
    exclude = [np.asarray(b, dtype=np.float64) for b in exclude]
    lo = np.min([b[0] for b in include], axis=0)
    hi = np.max([b[1] for b in include], axis=0)
    dims = np.round((hi - lo) / cell_mm).astype(int)
    occ = np.zeros(dims, dtype=bool)

    def cells(box):
        a = np.round((box[0] - lo) / cell_mm).astype(int)
        b = np.round((box[1] - lo) / cell_mm).astype(int)
        a = np.clip(a, 0, dims)
        b = np.clip(b, 0, dims)
        return tuple(slice(a[i], b[i]) for i in range(3))

    for b in include:
        occ[cells(b)] = True
    for b in exclude:
        occ[cells(b)] = False
    return voxel_mesh(occ, cell_mm=cell_mm, origin=lo, center_com=center_com)


def icosphere(radius=10.0, subdivisions=2):
    t = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(p) for p in v]
    index = {p: i for i, p in enumerate(verts)}

    def midpoint(a, b):
        m = (np.asarray(verts[a]) + np.asarray(verts[b])) / 2.0
        m /= np.linalg.norm(m)
        key = tuple(np.round(m, 12))
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    faces = f
    for _ in range(subdivisions):
        nxt = []
        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            nxt += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = nxt
    pts = np.asarray(verts, dtype=np.float64) * radius
    return TriMesh(pts, np.asarray(faces, dtype=np.int64))


def cone_mesh(radius=15.0, height=30.0, segments=24):
    """Right cone, base on z=0 centered at origin, apex at +z."""
    angles = np.linspace(0, 2 * np.pi, segments, endpoint=False)
    ring = np.stack([radius * np.cos(angles), radius * np.sin(angles),
                     np.zeros(segments)], axis=1)
    verts = np.vstack([ring, [[0, 0, 0]], [[0, 0, height]]])
    base_c = segments
    apex = segments + 1
    tris = []
    for i in range(segments):
        j = (i + 1) % segments
        tris.append([base_c, j, i])       # base (faces -z)
        tris.append([i, j, apex])         # side
    return TriMesh(verts, np.asarray(tris, dtype=np.int64))


def tetrahedron(points):
    pts = np.asarray(points, dtype=np.float64)
    tris = np.array([[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]], dtype=np.int64)
    mesh = TriMesh(pts, tris)
    if mesh.volume() < 0:   # fix orientation if the input is left-handed
        tris = tris[:, [0, 2, 1]]
        mesh = TriMesh(pts, tris)
    return mesh
