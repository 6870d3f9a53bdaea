import math

import numpy as np
import pytest

from pose6d import (DepthMap, ImageSize, PointSet, Pose, add_metric,
                    adds_metric, depth_metrics, sobel_gradient,
                    summarize_pose_errors, threshold_accuracy_auc,
                    transform_points)
from pose6d.errors import (CardinalityMismatch, EmptyInput, NoValidPixels,
                           Pose6DError, TooSmall)

from conftest import random_pose, random_unit_quat
from oracles import closest_mean_distance

SQUARE = PointSet([[0.5, 0.5, 0], [-0.5, 0.5, 0], [-0.5, -0.5, 0], [0.5, -0.5, 0]])


# --- ADD / ADD-S -------------------------------------------------------


def test_add_zero_for_identical_poses(rng):
    pose = random_pose(rng)
    assert add_metric(pose, pose, SQUARE) == 0.0
    assert adds_metric(pose, pose, SQUARE) == 0.0


def test_add_pure_translation_equals_offset_norm(rng):
    for _ in range(100):
        q = random_unit_quat(rng)
        t = rng.uniform(-1, 1, 3)
        dt = rng.uniform(-0.2, 0.2, 3)
        gt = Pose(q, tuple(t))
        pred = Pose(q, tuple(t + dt))
        assert add_metric(gt, pred, SQUARE) == pytest.approx(
            np.linalg.norm(dt), abs=1e-12)


def test_adds_never_exceeds_add(rng):
    pts = PointSet(rng.normal(size=(16, 3)))
    for _ in range(500):
        gt, pred = random_pose(rng), random_pose(rng)
        assert adds_metric(gt, pred, pts) <= add_metric(gt, pred, pts) + 1e-15


def test_adds_matches_exhaustive_oracle(rng):
    pts = PointSet(rng.normal(size=(7, 3)))
    for _ in range(100):
        gt, pred = random_pose(rng), random_pose(rng)
        a = transform_points(gt, pts).points
        b = transform_points(pred, pts).points
        assert adds_metric(gt, pred, pts) == closest_mean_distance(a, b)


def test_adds_zero_for_symmetric_quarter_turn():
    s = math.sin(math.pi / 4)
    gt = Pose.identity()
    pred = Pose((0, 0, s, math.cos(math.pi / 4)), (0, 0, 0))
    assert adds_metric(gt, pred, SQUARE) == pytest.approx(0.0, abs=1e-15)
    assert add_metric(gt, pred, SQUARE) > 0.5


# --- threshold accuracy ------------------------------------------------


def test_auc_all_zero_distances():
    assert threshold_accuracy_auc([0.0, 0.0], 0.1) == 1.0


def test_auc_linear_contribution():
    assert threshold_accuracy_auc([0.05], 0.10) == pytest.approx(0.5, abs=1e-15)
    assert threshold_accuracy_auc([0.05, 0.15], 0.10) == pytest.approx(0.25, abs=1e-15)


def test_auc_above_threshold_contributes_nothing():
    assert threshold_accuracy_auc([1.0, 2.0], 0.1) == 0.0


def test_auc_rejects_bad_input():
    with pytest.raises(Pose6DError):
        threshold_accuracy_auc([0.1], 0.0)
    with pytest.raises(EmptyInput):
        threshold_accuracy_auc([], 0.1)


# --- depth metrics -----------------------------------------------------


def _depth(grid, valid=None):
    grid = np.asarray(grid, dtype=float)
    if valid is None:
        valid = grid > 0
    return DepthMap(ImageSize(grid.shape[1], grid.shape[0]), grid, valid)


def test_depth_metrics_identical_maps_are_zero():
    dm = _depth([[1.0, 2.0], [3.0, 4.0]])
    rep = depth_metrics(dm, dm)
    assert rep.abs_rel == rep.sq_rel == rep.rmse == rep.rmse_log == 0.0


def test_depth_metrics_single_pixel_fixture():
    gt = _depth([[2.0]])
    pred = _depth([[1.0]])
    rep = depth_metrics(gt, pred)
    assert rep.abs_rel == pytest.approx(1.0, abs=1e-12)
    assert rep.sq_rel == pytest.approx(1.0, abs=1e-12)
    assert rep.rmse == pytest.approx(1.0, abs=1e-12)
    assert rep.rmse_log == pytest.approx(math.log(2), abs=1e-12)


def test_depth_metrics_denominator_switch():
    gt = _depth([[4.0]])
    pred = _depth([[2.0]])
    assert depth_metrics(gt, pred, "prediction").abs_rel == pytest.approx(1.0)
    assert depth_metrics(gt, pred, "ground_truth").abs_rel == pytest.approx(0.5)


def test_depth_metrics_use_only_mutually_valid_pixels():
    gt = _depth([[1.0, 5.0]], valid=[[True, False]])
    pred = _depth([[1.0, 9.0]], valid=[[True, True]])
    rep = depth_metrics(gt, pred)
    assert rep.rmse == 0.0


def test_depth_metrics_errors():
    gt = _depth([[1.0]])
    with pytest.raises(CardinalityMismatch):
        depth_metrics(gt, _depth([[1.0, 1.0]]))
    with pytest.raises(NoValidPixels):
        depth_metrics(gt, _depth([[1.0]], valid=[[False]]))
    with pytest.raises(Pose6DError):
        depth_metrics(gt, gt, "banana")


# --- Sobel gradients ---------------------------------------------------


def test_sobel_constant_map_is_flat():
    gx, gy = sobel_gradient(_depth(np.full((5, 5), 2.0)))
    assert np.all(gx == 0.0)
    assert np.all(gy == 0.0)


def test_sobel_ramp_along_x():
    grid = np.tile(np.arange(6, dtype=float) + 1.0, (4, 1))
    gx, gy = sobel_gradient(_depth(grid, valid=np.ones((4, 6), bool)))
    assert np.all(gx[:, 1:-1] == 8.0)
    assert np.all(gy == 0.0)


def test_sobel_ramp_along_y():
    grid = np.tile(np.arange(5, dtype=float)[:, None] + 1.0, (1, 4))
    gx, gy = sobel_gradient(_depth(grid, valid=np.ones((5, 4), bool)))
    assert np.all(gy[1:-1, :] == 8.0)
    assert np.all(gx == 0.0)


def test_sobel_rejects_tiny_maps():
    with pytest.raises(TooSmall):
        sobel_gradient(_depth(np.ones((2, 5))))


# --- aggregation -------------------------------------------------------


def test_summarize_pose_errors():
    rep = summarize_pose_errors([0.05, 0.15], [0.05, 0.05], max_threshold=0.10)
    assert rep.mean_add == pytest.approx(0.10)
    assert rep.mean_adds == pytest.approx(0.05)
    assert rep.auc_add == pytest.approx(0.25)
    assert rep.auc_adds == pytest.approx(0.50)


def test_summarize_rejects_mismatched_lists():
    with pytest.raises(CardinalityMismatch):
        summarize_pose_errors([0.1], [0.1, 0.2])
