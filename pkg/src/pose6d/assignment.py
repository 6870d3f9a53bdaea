"""Match-cost construction and optimal bipartite assignment.

Ground-truth sets are padded with no-object slots (represented as None) up to
the prediction cardinality. The assignment minimizes the summed pairwise match
cost exactly; among equal-cost optima the lexicographically smallest
permutation is returned, so results are deterministic across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import GroundTruthObject, PredictionTuple
from .errors import CardinalityMismatch, InvalidClass, InvalidCost
from .losses import patch_loss, pose_loss, LossWeights

__all__ = ["MatchWeights", "CostMatrix", "Assignment", "match_cost",
           "build_cost_matrix", "hungarian_assign"]


@dataclass(frozen=True)
class MatchWeights:
    """Knobs for the pairwise match cost.

    class_cost: "neg_prob" uses -P(c); "neg_log_prob" uses -log P(c), which
    mirrors the training loss composition exactly.
    empty_cost: "zero" makes padding rows constant 0; "neg_log_prob" charges
    -log P(no-object), mirroring the loss.
    lambda_match: weight of the pose term in the match cost (0 disables it).
    """

    sigma1: float = 2.0
    sigma2: float = 5.0
    lambda_match: float = 0.0
    class_cost: str = "neg_prob"
    empty_cost: str = "zero"

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0 or self.lambda_match < 0:
            raise InvalidCost("match weights must be >= 0")
        if self.class_cost not in ("neg_prob", "neg_log_prob"):
            raise InvalidCost(f"unknown class_cost {self.class_cost!r}")
        if self.empty_cost not in ("zero", "neg_log_prob"):
            raise InvalidCost(f"unknown empty_cost {self.empty_cost!r}")


class CostMatrix:
    """Square matrix of finite pairwise match costs."""

    __slots__ = ("n", "costs")

    def __init__(self, costs):
        a = np.asarray(costs, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidCost(f"cost matrix must be square and non-empty, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidCost("cost matrix contains non-finite entries")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        self.n = a.shape[0]
        self.costs = a


@dataclass(frozen=True)
class Assignment:
    """Permutation mapping ground-truth index -> prediction index."""

    perm: tuple[int, ...]
    total_cost: float

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InvalidCost(f"perm {self.perm} is not a bijection")


_PROB_FLOOR = 1e-12


def match_cost(gt, pred, weights, point_set=None, symmetric=False):
    """Pairwise match cost between one ground-truth slot and one prediction.

    gt is a GroundTruthObject or None for a no-object padding slot. The pose
    term needs point_set when lambda_match > 0.
    """
    if gt is None:
        if weights.empty_cost == "zero":
            return 0.0
        return -float(np.log(max(pred.class_dist.no_object_prob, _PROB_FLOOR)))
    if gt.class_id >= pred.class_dist.num_classes:
        raise InvalidClass(
            f"class id {gt.class_id} out of range for {pred.class_dist.num_classes} classes")
    p = pred.class_dist.prob(gt.class_id)
    if weights.class_cost == "neg_prob":
        cost = -p
    else:
        cost = -float(np.log(max(p, _PROB_FLOOR)))
    lw = LossWeights(weights.sigma1, weights.sigma2, weights.lambda_match)
    cost += patch_loss(gt.patch, pred.patch, lw)
    if weights.lambda_match > 0.0:
        if point_set is None:
            raise InvalidCost("lambda_match > 0 requires the object's point set")
        cost += weights.lambda_match * pose_loss(gt.pose, pred.pose, point_set, symmetric)
    return float(cost)


def build_cost_matrix(gt_set, preds, weights, point_sets=None, symmetric_class_ids=()):
    """Entry [i][j] = match_cost(gt_set[i], preds[j], weights).

    gt_set must already be padded with None to the same length as preds.
    point_sets maps model_points_ref -> PointSet (only needed when the match
    cost includes the pose term).
    """
    if len(gt_set) != len(preds):
        raise CardinalityMismatch(
            f"ground-truth set of {len(gt_set)} vs prediction set of {len(preds)}")
    n = len(preds)
    costs = np.empty((n, n), dtype=float)
    for i, gt in enumerate(gt_set):
        pts = None
        sym = False
        if gt is not None and weights.lambda_match > 0.0:
            if point_sets is None or gt.model_points_ref not in point_sets:
                raise InvalidCost(f"missing point set {gt.model_points_ref!r}")
            pts = point_sets[gt.model_points_ref]
            sym = gt.class_id in symmetric_class_ids
        for j, pred in enumerate(preds):
            costs[i, j] = match_cost(gt, pred, weights, pts, sym)
    return CostMatrix(costs)


def pad_ground_truth(objects, n_c):
    """Pad a list of GroundTruthObject with None up to cardinality n_c."""
    if len(objects) > n_c:
        raise CardinalityMismatch(f"{len(objects)} objects exceed cardinality {n_c}")
    return list(objects) + [None] * (n_c - len(objects))


def _perm_cost(a, perm):
    total = 0.0
    for i, j in enumerate(perm):
        total += a[i, j]
    return float(total)


def hungarian_assign(costs):
    """Exact minimum-cost assignment with lexicographic tie-breaking.

    The optimum value is found by the O(n^3) kernel; the returned permutation
    is then fixed row by row, taking the smallest column index that still
    allows the remaining rows to reach the optimum.
    """
    if not isinstance(costs, CostMatrix):
        costs = CostMatrix(costs)
    a = costs.costs
    n = costs.n
    best = _perm_cost(a, kernels.solve_assignment(a))
    tol = 1e-9 * max(1.0, abs(best))
    avail = list(range(n))
    perm = []
    fixed = 0.0
    for i in range(n):
        chosen = None
        for idx, j in enumerate(avail):
            rest = avail[:idx] + avail[idx + 1:]
            if rest:
                sub = np.ascontiguousarray(a[np.ix_(range(i + 1, n), rest)])
                sub_val = _perm_cost(sub, kernels.solve_assignment(sub))
            else:
                sub_val = 0.0
            if fixed + a[i, j] + sub_val <= best + tol:
                chosen = j
                avail = rest
                fixed += a[i, j]
                break
        if chosen is None:  # numerical corner: accept the direct solution
            direct = kernels.solve_assignment(a)
            return Assignment(tuple(int(j) for j in direct), _perm_cost(a, direct))
        perm.append(chosen)
    return Assignment(tuple(perm), _perm_cost(a, perm))
