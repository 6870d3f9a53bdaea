import numpy as np
import pytest

from pose6d import Patch, Pose


def random_unit_quat(rng):
    q = rng.normal(size=4)
    return tuple(q / np.linalg.norm(q))


def random_pose(rng, translation_scale=1.0):
    t = tuple(rng.uniform(-translation_scale, translation_scale, 3))
    return Pose(random_unit_quat(rng), t)


def random_patch(rng, lo=0.0, hi=6.0, min_side=0.1, max_side=2.0):
    w = rng.uniform(min_side, max_side)
    h = rng.uniform(min_side, max_side)
    return Patch(rng.uniform(lo, hi - w), rng.uniform(lo, hi - h), h, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
