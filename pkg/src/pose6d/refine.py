"""Depth-based translation refinement.

Pipeline: rescale the RGB-frame patch into the depth frame, read the depth at
the patch center (median-of-window fallback when the center pixel is invalid),
back-project the RGB-frame patch center through the pinhole model to complete
a depth-derived translation, and blend it with the regressed translation by a
convex weight pair. Rotation is never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CameraIntrinsics, DepthMap, ImageSize, Patch, Pose, PredictionTuple
from .errors import InvalidDepth, NoDepth, OutOfBounds, Pose6DError

__all__ = ["FusionConfig", "RefinedPose", "DepthSample", "rescale_patch",
           "patch_center", "lookup_depth", "back_project", "project",
           "fuse_translation", "refine_pose"]


@dataclass(frozen=True)
class FusionConfig:
    """Convex weights for blending depth-derived (w1) and regressed (w2)
    translations, plus the fallback window for depth lookup."""

    w1: float = 0.5
    w2: float = 0.5
    depth_window: int = 5

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise Pose6DError("fusion weights must be >= 0")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise Pose6DError(f"fusion weights sum to {self.w1 + self.w2}, expected 1")
        if self.depth_window < 1 or self.depth_window % 2 == 0:
            raise Pose6DError(f"depth window must be odd and >= 1, got {self.depth_window}")

    @staticmethod
    def from_losses(loss_depth, loss_regressed, depth_window=5):
        """Inverse-loss weighting: the lower-loss source gets the higher weight."""
        if loss_depth < 0 or loss_regressed < 0 or loss_depth + loss_regressed == 0:
            raise Pose6DError("losses must be >= 0 and not both zero")
        w1 = loss_regressed / (loss_depth + loss_regressed)
        return FusionConfig(w1, 1.0 - w1, depth_window)


@dataclass(frozen=True)
class RefinedPose:
    """Fusion result. pose carries the blended translation and the original
    rotation; t1/t2 are the depth-derived and regressed translations. When the
    depth lookup failed entirely, degraded is True and t1 == t2 (pure w2=1
    behavior)."""

    pose: Pose
    t1: tuple[float, float, float]
    t2: tuple[float, float, float]
    depth_center: tuple[float, float]
    used_depth_median: bool = False
    degraded: bool = False


class DepthSample(NamedTuple):
    value: float
    used_median: bool


def rescale_patch(p: Patch, s_o: ImageSize, s_d: ImageSize) -> Patch:
    """Map a patch from the RGB frame into the depth frame by per-axis scaling."""
    sx = s_d.width / s_o.width
    sy = s_d.height / s_o.height
    return Patch(p.bx * sx, p.by * sy, p.h * sy, p.w * sx)


def patch_center(p: Patch):
    return (p.bx + p.w / 2.0, p.by + p.h / 2.0)


def _round_half_up(x):
    return math.floor(x + 0.5)


def lookup_depth(dm: DepthMap, center, window: int = 5) -> DepthSample:
    """Depth at the rounded center pixel, or the median of valid pixels in the
    window x window neighborhood when the center pixel itself is invalid."""
    if window < 1 or window % 2 == 0:
        raise Pose6DError(f"window must be odd and >= 1, got {window}")
    cx, cy = center
    ix = _round_half_up(cx)
    iy = _round_half_up(cy)
    w, h = dm.size.width, dm.size.height
    if not (0 <= ix < w and 0 <= iy < h):
        raise OutOfBounds(f"center ({cx}, {cy}) rounds to ({ix}, {iy}) outside {w}x{h}")
    if dm.valid[iy, ix]:
        return DepthSample(float(dm.depths[iy, ix]), False)
    half = window // 2
    x0, x1 = max(ix - half, 0), min(ix + half + 1, w)
    y0, y1 = max(iy - half, 0), min(iy + half + 1, h)
    region_valid = dm.valid[y0:y1, x0:x1]
    if not region_valid.any():
        raise NoDepth(f"no valid depth within {window}x{window} of ({ix}, {iy})")
    return DepthSample(float(np.median(dm.depths[y0:y1, x0:x1][region_valid])), True)


def back_project(c_o, t_z1: float, k: CameraIntrinsics):
    """Invert the pinhole projection: pixel center + depth -> (t_x, t_y)."""
    if t_z1 <= 0:
        raise InvalidDepth(f"depth must be > 0, got {t_z1}")
    cx, cy = c_o
    return ((cx - k.ppx) * t_z1 / k.fx, (cy - k.ppy) * t_z1 / k.fy)


def project(t, k: CameraIntrinsics):
    """Forward pinhole projection of a 3D point in the camera frame."""
    tx, ty, tz = t
    if tz <= 0:
        raise InvalidDepth(f"depth must be > 0, got {tz}")
    return (k.fx * tx / tz + k.ppx, k.fy * ty / tz + k.ppy)


def fuse_translation(t1, t2, cfg: FusionConfig):
    return tuple(cfg.w1 * a + cfg.w2 * b for a, b in zip(t1, t2))


def refine_pose(pred: PredictionTuple, dm: DepthMap, s_o: ImageSize,
                k: CameraIntrinsics, cfg: FusionConfig) -> RefinedPose:
    """Full refinement of one prediction. Rotation passes through unchanged.

    When no depth is available at the patch center (NoDepth), the result
    degrades to the regressed translation with degraded=True.
    """
    t2 = pred.pose.translation
    depth_patch = rescale_patch(pred.patch, s_o, dm.size)
    c_d = patch_center(depth_patch)
    try:
        sample = lookup_depth(dm, c_d, cfg.depth_window)
    except NoDepth:
        return RefinedPose(pred.pose, t2, t2, c_d, used_depth_median=False, degraded=True)
    t_z1 = sample.value
    c_o = patch_center(pred.patch)
    t_x1, t_y1 = back_project(c_o, t_z1, k)
    t1 = (t_x1, t_y1, t_z1)
    fused = fuse_translation(t1, t2, cfg)
    pose = Pose(pred.pose.rotation, fused)
    return RefinedPose(pose, t1, t2, c_d, used_depth_median=sample.used_median)
