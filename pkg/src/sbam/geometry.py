"""Rigid-body poses and affordance regions.

All lengths are millimeters. Orientations are unit quaternions stored as
(w, x, y, z). Every type here is immutable after construction, so instances
can be shared freely across threads or processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Pose",
    "AffordanceRegion",
    "RegionRef",
    "compose",
    "region_world_center",
    "quat_mul",
    "quat_rotate",
    "quat_conjugate",
    "quat_from_axis_angle",
    "quat_normalize",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _vec3(v, name: str) -> np.ndarray:
    a = np.array(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return _freeze(a)


# Quaternion helpers operate on plain float 4-tuples (w, x, y, z); they are
# the hot path of forward kinematics, so they avoid numpy entirely.

def quat_mul(a, b):
    """Hamilton product a * b."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_rotate(q, v):
    """Rotate 3-vector v by unit quaternion q."""
    w, x, y, z = q
    vx, vy, vz = v
    tx = 2.0 * (y * vz - z * vy)
    ty = 2.0 * (z * vx - x * vz)
    tz = 2.0 * (x * vy - y * vx)
    return (
        vx + w * tx + (y * tz - z * ty),
        vy + w * ty + (z * tx - x * tz),
        vz + w * tz + (x * ty - y * tx),
    )


def quat_conjugate(q):
    w, x, y, z = q
    return (w, -x, -y, -z)


def quat_normalize(q):
    w, x, y, z = q
    n = math.sqrt(w * w + x * x + y * y + z * z)
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero quaternion")
    return (w / n, x / n, y / n, z / n)


def quat_from_axis_angle(axis, angle: float):
    """Unit quaternion rotating by `angle` radians about unit `axis`."""
    ax, ay, az = axis
    half = 0.5 * angle
    s = math.sin(half)
    return (math.cos(half), ax * s, ay * s, az * s)


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: rotate by `orientation`, then translate by `position`.

    The quaternion is renormalized on construction; inputs further than 1e-3
    from unit norm are rejected as invalid rather than silently fixed.
    """

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position, "position"))
        q = np.array(self.orientation, dtype=float)
        if q.shape != (4,):
            raise ValueError(f"orientation must be a quaternion (w, x, y, z), got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("orientation must be finite")
        n = math.sqrt(float(np.dot(q, q)))
        if abs(n - 1.0) > 1e-3:
            raise ValueError(f"quaternion norm {n:.6f} too far from 1")
        object.__setattr__(self, "orientation", _freeze(q / n))

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))

    @staticmethod
    def from_translation(v) -> "Pose":
        return Pose(v, np.array([1.0, 0.0, 0.0, 0.0]))

    @staticmethod
    def from_axis_angle(axis, angle: float, position=(0.0, 0.0, 0.0)) -> "Pose":
        axis = _vec3(axis, "axis")
        n = float(np.linalg.norm(axis))
        if n < 1e-12:
            raise ValueError("axis must be nonzero")
        return Pose(position, quat_from_axis_angle(tuple(axis / n), angle))

    def apply(self, point) -> np.ndarray:
        """Map a point from this pose's frame to the parent frame."""
        p = _vec3(point, "point")
        return self.position + np.array(quat_rotate(tuple(self.orientation), tuple(p)))

    def inverse(self) -> "Pose":
        qc = quat_conjugate(tuple(self.orientation))
        return Pose(-np.array(quat_rotate(qc, tuple(self.position))), qc)

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return np.array_equal(self.position, other.position) and np.array_equal(
            self.orientation, other.orientation
        )


def compose(parent: Pose, child: Pose) -> Pose:
    """Rigid composition: the returned pose maps child-frame points to the
    parent's parent frame. Associative; quaternion renormalized."""
    pq = tuple(parent.orientation)
    q = quat_mul(pq, tuple(child.orientation))
    p = parent.position + np.array(quat_rotate(pq, tuple(child.position)))
    return Pose(p, q)


@dataclass(frozen=True, order=True)
class RegionRef:
    """Reference to an affordance region: (owning object id, region name)."""

    object_id: str
    region: str

    @property
    def label(self) -> str:
        return f"{self.region} of {self.object_id}"


@dataclass(frozen=True, eq=False)
class AffordanceRegion:
    """Ellipse-approximated object part, e.g. the spout of a bottle.

    `local_center` is the ellipse center in the object frame; `radii` are the
    ellipse semi-axes. Constraint math uses only the center; the radii are
    carried through serialization untouched.
    """

    name: str
    object_id: str
    local_center: np.ndarray
    local_orientation: np.ndarray = None
    radii: np.ndarray = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("region name must be non-empty")
        if not self.object_id:
            raise ValueError("region object_id must be non-empty")
        object.__setattr__(self, "local_center", _vec3(self.local_center, "local_center"))
        ori = self.local_orientation
        if ori is None:
            ori = np.array([1.0, 0.0, 0.0, 0.0])
        object.__setattr__(self, "local_orientation", Pose(np.zeros(3), ori).orientation)
        radii = self.radii
        if radii is None:
            radii = np.zeros(3)
        radii = _vec3(radii, "radii")
        if np.any(radii < 0):
            raise ValueError("radii components must be >= 0")
        object.__setattr__(self, "radii", radii)

    @property
    def ref(self) -> RegionRef:
        return RegionRef(self.object_id, self.name)

    def __eq__(self, other):
        if not isinstance(other, AffordanceRegion):
            return NotImplemented
        return (
            self.name == other.name
            and self.object_id == other.object_id
            and np.array_equal(self.local_center, other.local_center)
            and np.array_equal(self.local_orientation, other.local_orientation)
            and np.array_equal(self.radii, other.radii)
        )


def region_world_center(object_pose: Pose, region: AffordanceRegion) -> np.ndarray:
    """World-frame position of a region's center given its object's pose."""
    return object_pose.apply(region.local_center)
