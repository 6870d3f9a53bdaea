"""Evaluation metrics: ADD / ADD-S pose distances with threshold-AUC
aggregation, the four standard depth-error metrics, and Sobel gradients of a
depth map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import DepthMap, Pose, transform_points
from .errors import (CardinalityMismatch, EmptyInput, InvalidDepth,
                     NoValidPixels, Pose6DError, TooSmall)

__all__ = ["add_metric", "adds_metric", "threshold_accuracy_auc",
           "DepthMetricReport", "depth_metrics", "sobel_gradient",
           "PoseMetricReport", "summarize_pose_errors"]


def add_metric(gt: Pose, pred: Pose, pts) -> float:
    """Mean distance between matched model points under the two poses."""
    a = transform_points(gt, pts).points
    b = transform_points(pred, pts).points
    diff = a - b
    total = 0.0
    for i in range(diff.shape[0]):
        dx, dy, dz = float(diff[i, 0]), float(diff[i, 1]), float(diff[i, 2])
        total += math.sqrt(dx * dx + dy * dy + dz * dz)
    return total / diff.shape[0]


def adds_metric(gt: Pose, pred: Pose, pts) -> float:
    """Closest-point variant of the mean distance, for symmetric objects."""
    a = transform_points(gt, pts).points
    b = transform_points(pred, pts).points
    return float(kernels.mean_closest_distance(a, b))


def threshold_accuracy_auc(distances, max_threshold: float) -> float:
    """Exact area under the accuracy-vs-threshold curve on [0, max_threshold],
    normalized to [0, 1]. Each distance d contributes (1 - d/T) when d <= T."""
    if max_threshold <= 0:
        raise Pose6DError(f"max threshold must be > 0, got {max_threshold}")
    ds = list(distances)
    if not ds:
        raise EmptyInput("no distances to aggregate")
    total = 0.0
    for d in ds:
        if d <= max_threshold:
            total += 1.0 - d / max_threshold
    return total / len(ds)


@dataclass(frozen=True)
class DepthMetricReport:
    abs_rel: float
    sq_rel: float
    rmse: float
    rmse_log: float


def depth_metrics(gt: DepthMap, pred: DepthMap,
                  denominator: str = "prediction") -> DepthMetricReport:
    """abs-rel, sq-rel, RMSE and RMSE_log over mutually valid pixels.

    The relative metrics divide by the predicted depth by default; pass
    denominator="ground_truth" for the older convention.
    """
    if gt.size != pred.size:
        raise CardinalityMismatch(f"depth map sizes differ: {gt.size} vs {pred.size}")
    if denominator not in ("prediction", "ground_truth"):
        raise Pose6DError(f"unknown denominator {denominator!r}")
    mask = gt.valid & pred.valid
    if not mask.any():
        raise NoValidPixels("no mutually valid pixels")
    d = gt.depths[mask]
    dh = pred.depths[mask]
    den = dh if denominator == "prediction" else d
    if np.any(den <= 0):
        raise InvalidDepth("nonpositive depth in the denominator")
    err = d - dh
    return DepthMetricReport(
        abs_rel=float(np.mean(np.abs(err) / den)),
        sq_rel=float(np.mean(err ** 2 / den)),
        rmse=float(np.sqrt(np.mean(err ** 2))),
        rmse_log=float(np.sqrt(np.mean((np.log(d) - np.log(dh)) ** 2))),
    )


_SOBEL_EDGE = np.array([1.0, 2.0, 1.0])


def sobel_gradient(dm: DepthMap):
    """3x3 Sobel gradients (d/dx, d/dy) of the depth grid, replicate-padded.

    Correlation convention: a ramp increasing along +x yields a positive d/dx
    of 8 per unit step on the interior.
    """
    if dm.size.width < 3 or dm.size.height < 3:
        raise TooSmall(f"map {dm.size.width}x{dm.size.height} smaller than the 3x3 kernel")
    g = np.pad(dm.depths, 1, mode="edge")
    right = g[:-2, 2:] + 2.0 * g[1:-1, 2:] + g[2:, 2:]
    left = g[:-2, :-2] + 2.0 * g[1:-1, :-2] + g[2:, :-2]
    gx = right - left
    down = g[2:, :-2] + 2.0 * g[2:, 1:-1] + g[2:, 2:]
    up = g[:-2, :-2] + 2.0 * g[:-2, 1:-1] + g[:-2, 2:]
    gy = down - up
    return gx, gy


@dataclass(frozen=True)
class PoseMetricReport:
    """Aggregated pose errors for one group of objects."""

    add_values: tuple[float, ...]
    adds_values: tuple[float, ...]
    mean_add: float
    mean_adds: float
    auc_add: float
    auc_adds: float

    def __post_init__(self):
        if self.mean_adds > self.mean_add + 1e-12:
            raise Pose6DError("mean ADD-S cannot exceed mean ADD")
        for v in (self.auc_add, self.auc_adds):
            if not 0.0 <= v <= 1.0:
                raise Pose6DError(f"AUC {v} outside [0, 1]")


def summarize_pose_errors(add_values, adds_values, max_threshold: float = 0.10):
    """Build a PoseMetricReport from parallel ADD / ADD-S distance lists."""
    add_values = tuple(float(v) for v in add_values)
    adds_values = tuple(float(v) for v in adds_values)
    if len(add_values) != len(adds_values):
        raise CardinalityMismatch("ADD and ADD-S lists differ in length")
    return PoseMetricReport(
        add_values=add_values,
        adds_values=adds_values,
        mean_add=float(np.mean(add_values)),
        mean_adds=float(np.mean(adds_values)),
        auc_add=threshold_accuracy_auc(add_values, max_threshold),
        auc_adds=threshold_accuracy_auc(adds_values, max_threshold),
    )
