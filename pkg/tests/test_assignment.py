import numpy as np
import pytest

from pose6d import (Assignment, ClassDistribution, CostMatrix,
                    GroundTruthObject, MatchWeights, Patch, Pose,
                    PredictionTuple, build_cost_matrix, hungarian_assign,
                    match_cost, pad_ground_truth)
from pose6d.errors import CardinalityMismatch, InvalidClass, InvalidCost

from oracles import brute_force_assignment


def make_prediction(prob_true, class_id, num_classes, patch, pose=None):
    probs = [0.0] * (num_classes + 1)
    probs[class_id] = prob_true
    probs[num_classes] = 1.0 - prob_true
    return PredictionTuple(ClassDistribution(tuple(probs)), patch,
                           pose or Pose.identity())


def test_perfect_match_costs_minus_one():
    patch = Patch(0, 0, 1, 2)
    gt = GroundTruthObject(0, patch, Pose.identity(), "m")
    pred = make_prediction(1.0, 0, 2, patch)
    assert match_cost(gt, pred, MatchWeights()) == -1.0


def test_padding_slot_costs_zero():
    pred = make_prediction(0.3, 0, 2, Patch(5, 5, 1, 1))
    assert match_cost(None, pred, MatchWeights()) == 0.0


def test_worked_match_cost_fixture():
    gt = GroundTruthObject(0, Patch(0, 0, 1, 2), Pose.identity(), "m")
    pred = make_prediction(0.5, 0, 1, Patch(1, 0, 1, 2))
    cost = match_cost(gt, pred, MatchWeights(sigma1=2, sigma2=5))
    assert cost == pytest.approx(-0.5 + 19 / 3, abs=1e-12)


def test_out_of_range_class_rejected():
    gt = GroundTruthObject(5, Patch(0, 0, 1, 1), Pose.identity(), "m")
    pred = make_prediction(1.0, 0, 2, Patch(0, 0, 1, 1))
    with pytest.raises(InvalidClass):
        match_cost(gt, pred, MatchWeights())


def test_zero_matrix_gives_identity_permutation():
    a = hungarian_assign(np.zeros((4, 4)))
    assert a.perm == (0, 1, 2, 3)
    assert a.total_cost == 0.0


def test_two_by_two_fixture():
    a = hungarian_assign(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert a.perm == (1, 0)
    assert a.total_cost == 4.0


def test_random_matrices_match_brute_force(rng):
    for n in (2, 3, 4, 5, 6):
        for _ in range(40):
            costs = rng.integers(-64, 64, size=(n, n)) / 64.0
            a = hungarian_assign(costs)
            perm, best = brute_force_assignment(costs)
            assert a.total_cost == best
            assert a.perm == perm


def test_continuous_random_matrices_match_brute_force(rng):
    for _ in range(100):
        costs = rng.uniform(-5, 5, size=(6, 6))
        a = hungarian_assign(costs)
        _, best = brute_force_assignment(costs)
        assert a.total_cost == best


def test_row_constant_shift_preserves_permutation(rng):
    for _ in range(50):
        costs = rng.uniform(-1, 1, size=(5, 5))
        base = hungarian_assign(costs)
        shifted = costs.copy()
        shifted[2, :] += 3.75
        after = hungarian_assign(shifted)
        assert after.perm == base.perm
        assert after.total_cost == pytest.approx(base.total_cost + 3.75, abs=1e-12)


def test_tie_break_is_lexicographically_smallest():
    # both diagonals cost 2; the lexicographically smaller (0, 1) must win
    a = hungarian_assign(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert a.perm == (0, 1)
    b = hungarian_assign(np.full((5, 5), 7.0))
    assert b.perm == (0, 1, 2, 3, 4)


def test_non_finite_costs_rejected():
    with pytest.raises(InvalidCost):
        hungarian_assign(np.array([[1.0, np.inf], [0.0, 1.0]]))
    with pytest.raises(InvalidCost):
        CostMatrix(np.array([[np.nan]]))


def test_assignment_validates_bijection():
    with pytest.raises(InvalidCost):
        Assignment((0, 0, 1), 0.0)


def test_build_cost_matrix_padding_rows_are_zero():
    patch = Patch(10, 10, 20, 20)
    gt = [GroundTruthObject(0, patch, Pose.identity(), "m")]
    preds = [make_prediction(0.9, 0, 1, patch) for _ in range(21)]
    cm = build_cost_matrix(pad_ground_truth(gt, 21), preds, MatchWeights())
    assert cm.n == 21
    assert np.all(cm.costs[1:, :] == 0.0)


def test_two_perfect_predictions_pair_up():
    p0, p1 = Patch(0, 0, 10, 10), Patch(100, 100, 10, 10)
    gts = [GroundTruthObject(0, p0, Pose.identity(), "m"),
           GroundTruthObject(1, p1, Pose.identity(), "m")]
    # predictions listed in swapped order
    preds = [make_prediction(1.0, 1, 2, p1), make_prediction(1.0, 0, 2, p0)]
    preds += [make_prediction(0.0, 0, 2, Patch(200, 200, 5, 5)) for _ in range(3)]
    cm = build_cost_matrix(pad_ground_truth(gts, 5), preds, MatchWeights())
    a = hungarian_assign(cm)
    assert a.perm[0] == 1 and a.perm[1] == 0
    assert a.total_cost == pytest.approx(-2.0, abs=1e-12)


def test_cardinality_mismatch_rejected():
    preds = [make_prediction(1.0, 0, 1, Patch(0, 0, 1, 1))] * 3
    with pytest.raises(CardinalityMismatch):
        build_cost_matrix([None] * 2, preds, MatchWeights())
    with pytest.raises(CardinalityMismatch):
        pad_ground_truth([None] * 4, 3)


def test_default_cardinality_is_21():
    from pose6d import RunConfig
    assert RunConfig().n_c == 21
