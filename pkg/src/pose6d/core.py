"""Domain types for the pose pipeline: patches, poses, depth maps, cameras.

All types are immutable after construction and validate their invariants
eagerly, so downstream code can assume well-formed values.

Conventions fixed here:
  * quaternions are Hamilton, stored in (x, y, z, w) order;
  * patches are (bottom-left x, bottom-left y, height, width) in pixels,
    with continuous sub-pixel coordinates;
  * the no-object class is the last slot of every class distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPointSet, InvalidClass, InvalidRotation, Pose6DError

__all__ = [
    "Patch",
    "ImageSize",
    "Pose",
    "ClassDistribution",
    "PredictionTuple",
    "GroundTruthObject",
    "PointSet",
    "CameraIntrinsics",
    "DepthMap",
    "quat_to_matrix",
    "quat_multiply",
    "transform_points",
    "compose",
]


def _check_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise Pose6DError(f"{name} must be finite, got {v}")


@dataclass(frozen=True)
class Patch:
    """Axis-aligned ROI: bottom-left corner plus height and width, pixels."""

    bx: float
    by: float
    h: float
    w: float

    def __post_init__(self):
        _check_finite("patch", self.bx, self.by, self.h, self.w)
        if self.h <= 0 or self.w <= 0:
            raise Pose6DError(f"patch height/width must be > 0, got {self.h}x{self.w}")

    def as_vector(self):
        return np.array([self.bx, self.by, self.h, self.w], dtype=float)

    @property
    def area(self):
        return self.h * self.w


@dataclass(frozen=True)
class ImageSize:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise Pose6DError(f"image size must be >= 1x1, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Pose:
    """Rigid transform: unit quaternion (x, y, z, w) plus translation in meters."""

    rotation: tuple[float, float, float, float]
    translation: tuple[float, float, float]

    def __post_init__(self):
        q = tuple(float(v) for v in self.rotation)
        t = tuple(float(v) for v in self.translation)
        if len(q) != 4 or len(t) != 3:
            raise Pose6DError("pose needs a 4-quaternion and a 3-translation")
        _check_finite("translation", *t)
        norm = math.sqrt(sum(v * v for v in q))
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-9:
            raise InvalidRotation(f"quaternion norm {norm} deviates from 1 by more than 1e-9")
        object.__setattr__(self, "rotation", q)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity():
        return Pose((0.0, 0.0, 0.0, 1.0), (0.0, 0.0, 0.0))

    def matrix(self):
        return quat_to_matrix(self.rotation)

    def translation_array(self):
        return np.array(self.translation, dtype=float)


@dataclass(frozen=True)
class ClassDistribution:
    """Probabilities over object classes plus the trailing no-object slot."""

    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.probabilities)
        if len(p) < 2:
            raise InvalidClass("need at least one object class plus the no-object slot")
        if any(not (0.0 <= v <= 1.0) for v in p):
            raise InvalidClass(f"probabilities must lie in [0,1], got {p}")
        total = sum(p)
        if abs(total - 1.0) > 1e-6:
            raise InvalidClass(f"probabilities sum to {total}, deviating from 1 by > 1e-6")
        if total != 1.0:
            p = tuple(v / total for v in p)
        object.__setattr__(self, "probabilities", p)

    @property
    def num_classes(self):
        return len(self.probabilities) - 1

    def prob(self, class_id):
        if not 0 <= class_id < self.num_classes:
            raise InvalidClass(f"class id {class_id} out of range [0, {self.num_classes})")
        return self.probabilities[class_id]

    @property
    def no_object_prob(self):
        return self.probabilities[-1]

    @staticmethod
    def one_hot(class_id, num_classes):
        """Probability 1 on class_id; class_id == num_classes means no-object."""
        if not 0 <= class_id <= num_classes:
            raise InvalidClass(f"class id {class_id} out of range")
        p = [0.0] * (num_classes + 1)
        p[class_id] = 1.0
        return ClassDistribution(tuple(p))


class PointSet:
    """Non-empty set of 3D model points, meters, object frame."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise EmptyPointSet(f"expected a non-empty (K,3) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise Pose6DError("point set contains non-finite values")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        self.points = pts

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"PointSet({len(self)} points)"


@dataclass(frozen=True)
class PredictionTuple:
    class_dist: ClassDistribution
    patch: Patch
    pose: Pose


@dataclass(frozen=True)
class GroundTruthObject:
    class_id: int
    patch: Patch
    pose: Pose
    model_points_ref: str

    def __post_init__(self):
        if self.class_id < 0:
            raise InvalidClass(f"class id must be >= 0, got {self.class_id}")


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole model: focal lengths and principal point, pixels."""

    fx: float
    fy: float
    ppx: float
    ppy: float

    def __post_init__(self):
        _check_finite("intrinsics", self.fx, self.fy, self.ppx, self.ppy)
        if self.fx <= 0 or self.fy <= 0:
            raise Pose6DError(f"focal lengths must be > 0, got {self.fx}, {self.fy}")

    def scaled(self, sx, sy):
        """Intrinsics of the same camera at a resolution scaled by (sx, sy)."""
        return CameraIntrinsics(self.fx * sx, self.fy * sy, self.ppx * sx, self.ppy * sy)


class DepthMap:
    """Row-major grid of metric depths with a validity mask."""

    __slots__ = ("size", "depths", "valid")

    def __init__(self, size, depths, valid):
        if not isinstance(size, ImageSize):
            size = ImageSize(*size)
        d = np.asarray(depths, dtype=float)
        v = np.asarray(valid, dtype=bool)
        shape = (size.height, size.width)
        if d.shape != shape or v.shape != shape:
            raise Pose6DError(
                f"depth grid shape {d.shape} / mask shape {v.shape} != (H,W)={shape}")
        if not np.all(d[v] > 0):
            raise Pose6DError("valid depths must be > 0")
        if not np.all(np.isfinite(d[v])):
            raise Pose6DError("valid depths must be finite")
        d = np.ascontiguousarray(d)
        v = np.ascontiguousarray(v)
        d.setflags(write=False)
        v.setflags(write=False)
        self.size = size
        self.depths = d
        self.valid = v

    def __eq__(self, other):
        return (isinstance(other, DepthMap) and self.size == other.size
                and np.array_equal(self.valid, other.valid)
                and np.array_equal(self.depths[self.valid], other.depths[other.valid]))

    def __repr__(self):
        return f"DepthMap({self.size.width}x{self.size.height}, {int(self.valid.sum())} valid)"


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion (x, y, z, w).

    Accepts quaternions off unit norm by up to 1e-6 and renormalizes.
    """
    x, y, z, w = (float(v) for v in q)
    norm = math.sqrt(x * x + y * y + z * z + w * w)
    if norm == 0.0 or not math.isfinite(norm):
        raise InvalidRotation("zero-norm or non-finite quaternion")
    if abs(norm - 1.0) > 1e-6:
        raise InvalidRotation(f"quaternion norm {norm} deviates from 1 by more than 1e-6")
    x, y, z, w = x / norm, y / norm, z / norm, w / norm
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def quat_multiply(a, b):
    """Hamilton product a*b, both (x, y, z, w)."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return (
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    )


def normalize_quat(q):
    norm = math.sqrt(sum(v * v for v in q))
    if norm == 0.0 or not math.isfinite(norm):
        raise InvalidRotation("zero-norm or non-finite quaternion")
    return tuple(v / norm for v in q)


def transform_points(pose, pts):
    """Apply R*x + t to every model point."""
    r = quat_to_matrix(pose.rotation)
    out = pts.points @ r.T + pose.translation_array()
    return PointSet(out)


def compose(p2, p1):
    """Pose applying p1 first, then p2."""
    q = normalize_quat(quat_multiply(p2.rotation, p1.rotation))
    r2 = quat_to_matrix(p2.rotation)
    t = r2 @ np.array(p1.translation) + np.array(p2.translation)
    return Pose(q, tuple(t))
