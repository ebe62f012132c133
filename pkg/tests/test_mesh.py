import struct

import numpy as np
import pytest

from pickplace.errors import DegenerateMesh, ParseError
from pickplace.geometry import TriMesh, load_mesh
from pickplace.geometry.mesh import save_obj
from pickplace.geometry.primitives import box_mesh, tetrahedron

CUBE_OBJ = """\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 3 4 8 7
f 2 3 7 6
f 1 5 8 4
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_unit_cube_obj(tmp_path):
    mesh = load_mesh(write(tmp_path, "cube.obj", CUBE_OBJ), scale=2.0)
    assert len(mesh.vertices) == 8
    assert len(mesh.triangles) == 12
    assert np.allclose(mesh.com, [1.0, 1.0, 1.0], atol=1e-9)   # (0.5,0.5,0.5)*scale
    assert mesh.watertight
    assert abs(mesh.volume() - 8.0) < 1e-9


def test_empty_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_mesh(write(tmp_path, "empty.obj", ""))


def test_bad_face_index(tmp_path):
    with pytest.raises(ParseError, match="3"):
        load_mesh(write(tmp_path, "bad.obj", "v 0 0 0\nv 1 0 0\nf 1 2 9\n"))


def test_degenerate_only(tmp_path):
    text = "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n"
    with pytest.raises(DegenerateMesh):
        load_mesh(write(tmp_path, "degen.obj", text))


def test_tetrahedron_stl_com(tmp_path):
    pts = np.array([[0, 0, 0], [30, 0, 0], [0, 24, 0], [0, 0, 18]], dtype=float)
    tet = tetrahedron(pts)
    lines = ["solid t"]
    for tri in tet.triangles:
        lines.append(" facet normal 0 0 0")
        lines.append("  outer loop")
        for vi in tri:
            v = tet.vertices[vi]
            lines.append(f"   vertex {v[0]} {v[1]} {v[2]}")
        lines.append("  endloop")
        lines.append(" endfacet")
    lines.append("endsolid t")
    mesh = load_mesh(write(tmp_path, "tet.stl", "\n".join(lines)))
    # Closed-form: uniform tetrahedron centroid is the vertex average.
    assert np.allclose(mesh.com, pts.mean(axis=0), atol=1e-9)
    assert mesh.watertight


def test_binary_stl_round_trip(tmp_path):
    box = box_mesh((10, 20, 30))
    path = tmp_path / "box.stl"
    with open(path, "wb") as f:
        f.write(b"\0" * 80)
        f.write(struct.pack("<I", len(box.triangles)))
        for tri in box.triangles:
            f.write(struct.pack("<3f", 0, 0, 0))
            for vi in tri:
                f.write(struct.pack("<3f", *box.vertices[vi]))
            f.write(struct.pack("<H", 0))
    mesh = load_mesh(path)
    assert len(mesh.triangles) == 12
    assert np.allclose(mesh.com, [0, 0, 0], atol=1e-6)
    assert abs(mesh.volume() - 6000.0) < 1e-3
    assert mesh.watertight


def test_truncated_binary_stl_cites_offset(tmp_path):
    path = tmp_path / "trunc.stl"
    path.write_bytes(b"\0" * 90)
    with pytest.raises(ParseError, match="byte"):
        load_mesh(path)


def test_save_obj_round_trip(tmp_path):
    box = box_mesh((4, 6, 8), center=(1, 2, 3))
    path = tmp_path / "rt.obj"
    save_obj(box, path)
    again = load_mesh(path)
    assert np.allclose(sorted(map(tuple, again.vertices)),
                       sorted(map(tuple, box.vertices)), atol=1e-9)
    assert abs(again.volume() - box.volume()) < 1e-9


def test_triangle_index_out_of_range():
    with pytest.raises(ParseError):
        TriMesh(np.zeros((3, 3)), np.array([[0, 1, 5]]))
