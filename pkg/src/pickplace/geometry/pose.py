"""Rigid transforms as unit quaternion (w, x, y, z) plus translation in mm.

Every construction and composition renormalizes the quaternion, and the
sign is canonicalized to w >= 0 so equal rotations compare equal.
"""

from dataclasses import dataclass, field

import numpy as np


def _normalize_quat(q):
    q = np.asarray(q, dtype=np.float64)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("zero quaternion")
    q = q / n
    if q[0] < 0.0 or (q[0] == 0.0 and (q[1] < 0.0 or (q[1] == 0.0 and (q[2] < 0.0 or (q[2] == 0.0 and q[3] < 0.0))))):
        q = -q
    return q


def _quat_mul(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def _quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def _matrix_to_quat(m):
    # Shepperd's method, branch on the largest diagonal term.
    t = np.trace(m)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] >= m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    return np.array([w, x, y, z])


@dataclass(frozen=True)
class Pose:
    quat: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    trans: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "quat", _normalize_quat(self.quat))
        t = np.asarray(self.trans, dtype=np.float64).copy()
        if t.shape != (3,):
            raise ValueError("translation must be a 3-vector")
        object.__setattr__(self, "trans", t)
        self.quat.setflags(write=False)
        t.setflags(write=False)

    @staticmethod
    def identity():
        return Pose()

    @staticmethod
    def from_axis_angle(axis, angle_rad, trans=(0.0, 0.0, 0.0)):
        axis = np.asarray(axis, dtype=np.float64)
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValueError("zero rotation axis")
        axis = axis / n
        half = 0.5 * angle_rad
        q = np.concatenate([[np.cos(half)], np.sin(half) * axis])
        return Pose(q, np.asarray(trans, dtype=np.float64))

    @staticmethod
    def from_matrix(m):
        m = np.asarray(m, dtype=np.float64)
        return Pose(_matrix_to_quat(m[:3, :3]), m[:3, 3])

    @staticmethod
    def from_translation(t):
        return Pose(np.array([1.0, 0.0, 0.0, 0.0]), np.asarray(t, dtype=np.float64))

    def rotation_matrix(self):
        return _quat_to_matrix(self.quat)

    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.rotation_matrix()
        m[:3, 3] = self.trans
        return m

    def compose(self, other):
        """Return self applied after other: (self @ other)(x) = self(other(x))."""
        q = _quat_mul(self.quat, other.quat)
        t = self.apply(other.trans.reshape(1, 3))[0]
        return Pose(q, t)

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        qc = self.quat * np.array([1.0, -1.0, -1.0, -1.0])
        r_inv = _quat_to_matrix(_normalize_quat(qc))
        return Pose(qc, -(r_inv @ self.trans))

    def apply(self, points):
        """Transform an (N, 3) point array (or a single 3-vector)."""
        pts = np.asarray(points, dtype=np.float64)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        out = pts @ self.rotation_matrix().T + self.trans
        return out[0] if single else out

    def rotate(self, vectors):
        """Rotate vectors without translating."""
        v = np.asarray(vectors, dtype=np.float64)
        single = v.ndim == 1
        v = np.atleast_2d(v)
        out = v @ self.rotation_matrix().T
        return out[0] if single else out

    def rotation_angle_deg(self):
        w = min(1.0, abs(float(self.quat[0])))
        return np.degrees(2.0 * np.arccos(w))

    def angle_to_deg(self, other):
        """Geodesic rotation angle between the two poses' orientations."""
        dot = abs(float(np.dot(self.quat, other.quat)))
        return np.degrees(2.0 * np.arccos(min(1.0, dot)))

    def almost_equal(self, other, tol_deg=1e-6, tol_mm=1e-6):
        return (self.angle_to_deg(other) <= tol_deg
                and np.linalg.norm(self.trans - other.trans) <= tol_mm)

    def to_dict(self):
        return {"quat": [float(v) for v in self.quat],
                "trans": [float(v) for v in self.trans]}

    @staticmethod
    def from_dict(d):
        return Pose(np.asarray(d["quat"], dtype=np.float64),
                    np.asarray(d["trans"], dtype=np.float64))

    def __repr__(self):
        q = ", ".join(f"{v:.6f}" for v in self.quat)
        t = ", ".join(f"{v:.3f}" for v in self.trans)
        return f"Pose(quat=[{q}], trans=[{t}])"
