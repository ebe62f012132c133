"""Triangle mesh container plus OBJ / STL loaders.

All coordinates are millimeters after the load-time scale factor. OBJ
supports vertices and (triangulated) faces only; STL supports both the
ASCII and the de-facto binary layout. Parse failures cite the offending
line (OBJ, ASCII STL) or byte offset (binary STL).
"""

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateMesh, ParseError

_AREA_EPS = 1e-12
_WELD_DECIMALS = 6


@dataclass
class TriMesh:
    vertices: np.ndarray              # (V, 3) float64, mm
    triangles: np.ndarray             # (T, 3) int64
    com: np.ndarray = field(init=False)
    watertight: bool = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        t = np.asarray(self.triangles, dtype=np.int64)
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise ParseError("triangle index out of range")
        areas = _tri_areas(v, t)
        keep = areas > _AREA_EPS
        t = t[keep]
        if len(t) == 0:
            raise DegenerateMesh("no non-degenerate triangles")
        self.vertices = v
        self.triangles = t
        self.watertight = _is_watertight(t)
        self.com = _signed_tet_com(v, t)

    @property
    def tri_points(self):
        return self.vertices[self.triangles]

    @property
    def areas(self):
        return _tri_areas(self.vertices, self.triangles)

    @property
    def normals(self):
        p = self.tri_points
        n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        ln = np.linalg.norm(n, axis=1, keepdims=True)
        return n / np.maximum(ln, 1e-30)

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def volume(self):
        p = self.tri_points
        return float(np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])).sum() / 6.0)

    def transformed(self, pose):
        return TriMesh(pose.apply(self.vertices), self.triangles.copy())

    def content_hash(self):
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.vertices).tobytes())
        h.update(np.ascontiguousarray(self.triangles).tobytes())
        return h.hexdigest()


def _tri_areas(v, t):
    if len(t) == 0:
        return np.zeros(0)
    p = v[t]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def _is_watertight(tris):
    """Every directed edge must appear exactly once with its reverse present."""
    edges = {}
    for tri in tris:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (int(a), int(b))
            if key in edges:
                return False
            edges[key] = True
    for a, b in edges:
        if (b, a) not in edges:
            return False
    return True


def _signed_tet_com(v, t):
    """Center of mass by signed tetrahedra against the origin, uniform density."""
    p = v[t]
    vols = np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])) / 6.0
    total = vols.sum()
    if abs(total) < 1e-9:
        # Open or flat shell: fall back to area-weighted surface centroid.
        areas = _tri_areas(v, t)
        centroids = p.mean(axis=1)
        return (centroids * areas[:, None]).sum(axis=0) / areas.sum()
    centroids = p.sum(axis=1) / 4.0
    return (centroids * vols[:, None]).sum(axis=0) / total


def _weld_vertices(verts, tris):
    keys = np.round(verts, _WELD_DECIMALS)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    return verts[first], inverse[tris]


def load_mesh(path, fmt=None, scale=1.0):
    """Load an OBJ or STL file into a TriMesh, applying the unit scale.

    fmt may be 'obj', 'stl-ascii', 'stl-binary', or None to infer from the
    extension (and, for .stl, from the content).
    """
    path = str(path)
    if fmt is None:
        low = path.lower()
        if low.endswith(".obj"):
            fmt = "obj"
        elif low.endswith(".stl"):
            fmt = "stl"
        else:
            raise ParseError(f"cannot infer mesh format from path: {path}")
    if fmt == "obj":
        verts, tris = _parse_obj(path)
    elif fmt in ("stl", "stl-ascii", "stl-binary"):
        verts, tris = _parse_stl(path, fmt)
    else:
        raise ParseError(f"unsupported mesh format: {fmt}")
    verts = np.asarray(verts, dtype=np.float64) * float(scale)
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    if len(verts) == 0 or len(tris) == 0:
        raise ParseError(f"{path}: no geometry found")
    verts, tris = _weld_vertices(verts, tris)
    return TriMesh(verts, tris)


def _parse_obj(path):
    verts = []
    tris = []
    with open(path, "r", errors="replace") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise ParseError(f"{path}:{lineno}: vertex needs 3 coordinates")
                try:
                    verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad vertex coordinate") from None
            elif tag == "f":
                if len(parts) < 4:
                    raise ParseError(f"{path}:{lineno}: face needs at least 3 vertices")
                idx = []
                for ref in parts[1:]:
                    tok = ref.split("/")[0]
                    try:
                        i = int(tok)
                    except ValueError:
                        raise ParseError(f"{path}:{lineno}: bad face index '{ref}'") from None
                    i = i - 1 if i > 0 else len(verts) + i
                    if i < 0 or i >= len(verts):
                        raise ParseError(f"{path}:{lineno}: face index {ref} out of range")
                    idx.append(i)
                for k in range(1, len(idx) - 1):   # fan-triangulate polygons
                    tris.append([idx[0], idx[k], idx[k + 1]])
            # other tags (vn, vt, usemtl, o, g, s, mtllib) are ignored
    if not verts:
        raise ParseError(f"{path}:1: no vertices")
    return verts, tris


def _looks_ascii_stl(data):
    if not data.lstrip().startswith(b"solid"):
        return False
    # A binary file may still start with "solid"; require a facet keyword.
    return b"facet" in data[:1024] or len(data.strip()) <= len("solid x")


def _parse_stl(path, fmt):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) == 0:
        raise ParseError(f"{path}: byte 0: empty file")
    if fmt == "stl-ascii" or (fmt == "stl" and _looks_ascii_stl(data)):
        return _parse_stl_ascii(path, data)
    return _parse_stl_binary(path, data)


def _parse_stl_ascii(path, data):
    verts = []
    tris = []
    current = []
    for lineno, raw in enumerate(data.decode(errors="replace").splitlines(), start=1):
        parts = raw.strip().split()
        if not parts:
            continue
        if parts[0] == "vertex":
            if len(parts) < 4:
                raise ParseError(f"{path}:{lineno}: vertex needs 3 coordinates")
            try:
                current.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad vertex coordinate") from None
        elif parts[0] == "endfacet":
            if len(current) != 3:
                raise ParseError(f"{path}:{lineno}: facet with {len(current)} vertices")
            base = len(verts)
            verts.extend(current)
            tris.append([base, base + 1, base + 2])
            current = []
    if not tris:
        raise ParseError(f"{path}:1: no facets found")
    return verts, tris


def _parse_stl_binary(path, data):
    if len(data) < 84:
        raise ParseError(f"{path}: byte {len(data)}: truncated binary STL header")
    (count,) = struct.unpack_from("<I", data, 80)
    if count == 0:
        raise ParseError(f"{path}: byte 80: facet count is zero")
    expected = 84 + count * 50
    if len(data) < expected:
        raise ParseError(
            f"{path}: byte {len(data)}: expected {expected} bytes for {count} facets")
    body = np.frombuffer(data, dtype=np.uint8, count=count * 50, offset=84)
    body = body.reshape(count, 50)
    floats = body[:, :48].copy().view("<f4").reshape(count, 4, 3)
    verts = floats[:, 1:4, :].reshape(-1, 3).astype(np.float64)
    tris = np.arange(count * 3, dtype=np.int64).reshape(-1, 3)
    return verts, tris


def save_obj(mesh, path):
    """Write a TriMesh as a minimal OBJ file (vertices + triangular faces)."""
    with open(path, "w") as f:
        for v in mesh.vertices:
            f.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for t in mesh.triangles:
            f.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
