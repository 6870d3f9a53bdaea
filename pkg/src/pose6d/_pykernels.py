"""Pure-python fallbacks for the hot kernels.

Same semantics as pose6d._ckernels; the compiled module is preferred at
import time when available (see pose6d.kernels).
"""

import math

import numpy as np


def solve_assignment(cost):
    """Minimum-cost perfect matching on a square cost matrix.

    O(n^3) Kuhn-Munkres with row/column potentials. Returns the row -> column
    permutation as an int64 array. Ties are broken by scan order; callers
    needing a specific tie-break should post-process (see assignment module).
    """
    a = np.asarray(cost, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    rows = a.tolist()
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)       # p[j]: row matched to column j, 1-indexed, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = rows[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = -1
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm


def mean_closest_distance(a, b):
    """Mean over rows of a of the distance to the closest row of b.

    Both inputs are (K, 3) float arrays. Accumulation is sequential in i so
    results are bit-identical to a plain double loop.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = 0.0
    for i in range(a.shape[0]):
        diff = b - a[i]
        d2 = np.min(diff[:, 0] ** 2 + diff[:, 1] ** 2 + diff[:, 2] ** 2)
        total += math.sqrt(d2)
    return total / a.shape[0]
