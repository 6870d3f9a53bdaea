"""Training-time losses: patch/GIoU, pose/ShapeMatch, the matched composite
loss over a full prediction set, and the depth L1 loss.

All losses are plain floats over the core domain types; there is no autograd.
Probabilities are floored at 1e-12 before taking logs so the composite loss
stays finite at zero predicted probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Patch, Pose, quat_to_matrix
from .errors import CardinalityMismatch, InvalidCost, NoValidPixels

__all__ = ["LossWeights", "giou_loss", "patch_loss", "shape_match_loss",
           "pose_loss", "hungarian_loss", "depth_loss"]

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossWeights:
    sigma1: float = 2.0
    sigma2: float = 5.0
    lambda_pose: float = 0.05

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0 or self.lambda_pose < 0:
            raise InvalidCost("loss weights must be >= 0")


def _bounds(p: Patch):
    return p.bx, p.bx + p.w, p.by, p.by + p.h


def giou_loss(a: Patch, b: Patch) -> float:
    """Generalized IoU loss in [0, 2]: 1 - (IoU - |enclosure \\ union| / |enclosure|).

    The enclosure is the smallest axis-aligned patch containing both inputs.
    Zero iff the patches coincide.
    """
    ax0, ax1, ay0, ay1 = _bounds(a)
    bx0, bx1, by0, by1 = _bounds(b)
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    inter = max(iw, 0.0) * max(ih, 0.0)
    # areas from the same bound differences as the intersection, so identical
    # patches yield exactly 0
    union = (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter
    enclosure = (max(ax1, bx1) - min(ax0, bx0)) * (max(ay1, by1) - min(ay0, by0))
    return 1.0 - (inter / union - (enclosure - union) / enclosure)


def patch_loss(a: Patch, b: Patch, w: LossWeights) -> float:
    """sigma1 * GIoU loss + sigma2 * L1 over the (bx, by, h, w) vector."""
    l1 = abs(a.bx - b.bx) + abs(a.by - b.by) + abs(a.h - b.h) + abs(a.w - b.w)
    return w.sigma1 * giou_loss(a, b) + w.sigma2 * l1


def shape_match_loss(r_gt, r_pred, pts, symmetric: bool) -> float:
    """Rotation loss over the model points.

    Asymmetric: mean per-point distance between the two rotated point sets.
    Symmetric: each ground-truth-rotated point is matched to its closest
    predicted-rotated point, so symmetry-equivalent rotations cost zero.
    r_gt / r_pred are 3x3 rotation matrices.
    """
    r_gt = np.asarray(r_gt, dtype=float)
    r_pred = np.asarray(r_pred, dtype=float)
    a = pts.points @ r_gt.T
    b = pts.points @ r_pred.T
    if symmetric:
        return float(kernels.mean_closest_distance(a, b))
    diff = a - b
    total = 0.0
    for i in range(diff.shape[0]):
        dx, dy, dz = float(diff[i, 0]), float(diff[i, 1]), float(diff[i, 2])
        total += math.sqrt(dx * dx + dy * dy + dz * dz)
    return total / diff.shape[0]


def pose_loss(gt: Pose, pred: Pose, pts, symmetric: bool) -> float:
    """ShapeMatch rotation term plus L2 norm of the translation error."""
    rot = shape_match_loss(quat_to_matrix(gt.rotation), quat_to_matrix(pred.rotation),
                           pts, symmetric)
    dt = np.array(gt.translation) - np.array(pred.translation)
    return rot + float(np.linalg.norm(dt))


def hungarian_loss(gt_set, preds, assignment, w: LossWeights, point_sets,
                   symmetric_class_ids=(), no_object_weight: float = 1.0) -> float:
    """Composite matched loss over all prediction slots.

    gt_set is padded with None to the prediction cardinality; assignment maps
    ground-truth index -> prediction index. Real slots contribute
    lambda_pose * pose + (-log P(class)) + patch; padding slots contribute
    no_object_weight * (-log P(no-object)).
    """
    if len(gt_set) != len(preds) or len(assignment.perm) != len(preds):
        raise CardinalityMismatch(
            f"lengths differ: gt {len(gt_set)}, preds {len(preds)}, "
            f"perm {len(assignment.perm)}")
    total = 0.0
    for i, gt in enumerate(gt_set):
        pred = preds[assignment.perm[i]]
        if gt is None:
            total += no_object_weight * -math.log(max(pred.class_dist.no_object_prob,
                                                      PROB_FLOOR))
            continue
        pts = point_sets[gt.model_points_ref]
        symmetric = gt.class_id in symmetric_class_ids
        total += w.lambda_pose * pose_loss(gt.pose, pred.pose, pts, symmetric)
        total += -math.log(max(pred.class_dist.prob(gt.class_id), PROB_FLOOR))
        total += patch_loss(gt.patch, pred.patch, w)
    return total


def depth_loss(gt, pred) -> float:
    """Mean absolute depth error over mutually valid pixels."""
    if gt.size != pred.size:
        raise CardinalityMismatch(
            f"depth map sizes differ: {gt.size} vs {pred.size}")
    mask = gt.valid & pred.valid
    if not mask.any():
        raise NoValidPixels("no mutually valid pixels")
    return float(np.mean(np.abs(gt.depths[mask] - pred.depths[mask])))
