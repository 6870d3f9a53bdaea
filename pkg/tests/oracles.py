"""Independent brute-force oracles used to cross-check the library.

These deliberately avoid the library's own code paths: assignment by
exhaustive permutation enumeration, GIoU by grid rasterization, closest-point
distances by explicit double loops.
"""

import itertools
import math

import numpy as np


def brute_force_assignment(costs):
    """Exhaustive minimum over all permutations, lexicographic order, strict
    improvement only (so ties resolve to the lexicographically smallest)."""
    a = np.asarray(costs)
    n = a.shape[0]
    best_perm = None
    best_cost = math.inf
    for perm in itertools.permutations(range(n)):
        total = 0.0
        for i, j in enumerate(perm):
            total += a[i, j]
        if total < best_cost:
            best_cost = total
            best_perm = perm
    return best_perm, float(best_cost)


RASTER_DOMAIN = 8.0
RASTER_RES = 512
RASTER_CELL = RASTER_DOMAIN / RASTER_RES  # 1/64


def snap_to_raster(value):
    """Snap a coordinate to the raster grid so cell counting is exact."""
    return round(value / RASTER_CELL) * RASTER_CELL


def raster_giou(a, b, res=RASTER_RES, domain=RASTER_DOMAIN):
    """GIoU loss from rasterized areas on a res x res grid over
    [0, domain]^2. Cell centers are tested for membership per axis; the 2D
    count of an axis-aligned rectangle is the product of its axis counts."""
    centers = (np.arange(res) + 0.5) * (domain / res)
    cell = (domain / res) ** 2

    def counts(p):
        nx = int(np.count_nonzero((centers >= p.bx) & (centers <= p.bx + p.w)))
        ny = int(np.count_nonzero((centers >= p.by) & (centers <= p.by + p.h)))
        return nx, ny

    ax, ay = counts(a)
    bx, by = counts(b)
    ix = int(np.count_nonzero((centers >= max(a.bx, b.bx))
                              & (centers <= min(a.bx + a.w, b.bx + b.w))))
    iy = int(np.count_nonzero((centers >= max(a.by, b.by))
                              & (centers <= min(a.by + a.h, b.by + b.h))))
    ex = int(np.count_nonzero((centers >= min(a.bx, b.bx))
                              & (centers <= max(a.bx + a.w, b.bx + b.w))))
    ey = int(np.count_nonzero((centers >= min(a.by, b.by))
                              & (centers <= max(a.by + a.h, b.by + b.h))))

    inter = ix * iy * cell
    union = ax * ay * cell + bx * by * cell - inter
    enclosure = ex * ey * cell
    return 1.0 - (inter / union - (enclosure - union) / enclosure)


def closest_mean_distance(a, b):
    """Mean over rows of a of the distance to the closest row of b, by an
    explicit O(len(a) * len(b)) double loop."""
    total = 0.0
    for p in a:
        best = math.inf
        for q in b:
            dx = float(p[0]) - float(q[0])
            dy = float(p[1]) - float(q[1])
            dz = float(p[2]) - float(q[2])
            d = math.sqrt(dx * dx + dy * dy + dz * dz)
            if d < best:
                best = d
        total += best
    return total / len(a)


def matched_mean_distance(a, b):
    """Mean matched-pair distance by an explicit loop."""
    total = 0.0
    for p, q in zip(a, b):
        dx = float(p[0]) - float(q[0])
        dy = float(p[1]) - float(q[1])
        dz = float(p[2]) - float(q[2])
        total += math.sqrt(dx * dx + dy * dy + dz * dz)
    return total / len(a)
