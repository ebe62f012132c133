"""Synthetic benchmark objects, all COM-centered and watertight.

Referenced from configs as ``builtin:<name>`` so evaluations need no mesh
files on disk. The shapes are chosen to exercise specific pipeline
mechanisms: tactile keying, visual ambiguity, placement reachability.
"""

import numpy as np

from ..geometry import TriMesh
from ..geometry.mesh import load_mesh
from ..geometry.primitives import box_mesh, solid_from_boxes


def keyed_rod():
    """Rod with a wide paddle at one end and an oversized end stop.

    Side grasps on the paddle close on its faces only (the slim core is
    recessed beyond the penetration depth), so the grasp width flags the
    paddle, but deep inside it the contact masks are featureless
    full-window rectangles: touch alone can neither place the grasp along
    the paddle nor orient the rod. The paddle edges are visible from
    above, so vision anchors both. The slim mid-section gives featureless
    masks of its own away from any overhead landmark, and the end stop is
    wider than the gripper opening, removing far-end grasps.
    """
    return solid_from_boxes(
        include=[
            ((0, 0, 0), (100, 10, 6)),                 # slim core
            ((4, -2, 0), (44, 12, 8)),                 # keyed-end paddle
            ((90, -12, 0), (100, 22, 8)),              # end stop
        ],
    )


def plain_rod():
    """Same rod without the key: translationally ambiguous to the touch."""
    return solid_from_boxes(include=[((0, 0, 0), (70, 10, 8))])


def notched_cube():
    """20 mm cube missing a 10 mm corner: fully asymmetric observations."""
    return solid_from_boxes(
        include=[((0, 0, 0), (20, 20, 20))],
        exclude=[((10, 10, 10), (20, 20, 20))],
    )


def l_bracket():
    """L-shaped bracket with unequal arms."""
    return solid_from_boxes(
        include=[((0, 0, 0), (36, 12, 8)), ((0, 0, 0), (12, 12, 28))],
    )


def stepped_block():
    """26x12x10 block with a full-width step on top near one end.

    Grasps at the stepped end produce taller contact masks (observable)
    and sit near the top when the block stands in its cavity; grasps at
    the center and plain end cannot place a standing goal directly.
    """
    return solid_from_boxes(
        include=[((0, 0, 0), (26, 12, 10)), ((2, 0, 10), (8, 12, 14))],
    )


def facet_block():
    """Block with grid-subdivided faces (~1000 triangles) for perf runs."""
    n = 9
    size = np.array([30.0, 24.0, 18.0])
    verts = {}
    tris = []

    def vid(p):
        key = tuple(np.round(p, 9))
        if key not in verts:
            verts[key] = len(verts)
        return verts[key]

    for axis in range(3):
        for side in (0.0, 1.0):
            u_axis = (axis + 1) % 3
            v_axis = (axis + 2) % 3
            for iu in range(n):
                for iv in range(n):
                    corners = []
                    for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = np.zeros(3)
                        p[axis] = side * size[axis]
                        p[u_axis] = (iu + du) / n * size[u_axis]
                        p[v_axis] = (iv + dv) / n * size[v_axis]
                        corners.append(vid(p))
                    a, b, c, d = corners
                    if side > 0.5:
                        tris += [[a, b, c], [a, c, d]]
                    else:
                        tris += [[a, c, b], [a, d, c]]
    pts = np.array([k for k, _ in sorted(verts.items(), key=lambda kv: kv[1])])
    mesh = TriMesh(pts, np.asarray(tris, dtype=np.int64))
    return TriMesh(mesh.vertices - mesh.com, mesh.triangles)


def cube20():
    return box_mesh((20.0, 20.0, 20.0))


BUILTIN_OBJECTS = {
    "keyed_rod": keyed_rod,
    "plain_rod": plain_rod,
    "notched_cube": notched_cube,
    "l_bracket": l_bracket,
    "stepped_block": stepped_block,
    "facet_block": facet_block,
    "cube20": cube20,
}


def builtin_mesh(name):
    if name not in BUILTIN_OBJECTS:
        raise KeyError(f"unknown builtin object '{name}'; "
                       f"choices: {sorted(BUILTIN_OBJECTS)}")
    return BUILTIN_OBJECTS[name]()


def resolve_mesh(spec, scale=1.0):
    """Load ``builtin:<name>`` or a mesh file path."""
    if spec.startswith("builtin:"):
        mesh = builtin_mesh(spec.split(":", 1)[1])
        if scale != 1.0:
            mesh = TriMesh(mesh.vertices * scale, mesh.triangles)
        return mesh
    return load_mesh(spec, scale=scale)
