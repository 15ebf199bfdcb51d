"""Independent reference computations used by the tests.

None of these call into the code they check.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np


def wls_objective(p, w, q):
    return sum(wi * (pi - qi) ** 2 for pi, wi, qi in zip(p, w, q))


def grid_minimize_triplet(p, w, final_step=1e-4, window=20):
    """Minimize the weighted squared error over Q_ik = Q_ij + Q_jk - 1.

    Exhaustive grid over (Q_ij, Q_jk) at step 0.01, then exhaustive grids of
    +-``window`` cells at steps 1e-3 and 1e-4 around the incumbent. The
    objective is a convex quadratic, so refinement cannot leave the basin.
    """
    center = None
    step = 1e-2
    while True:
        if center is None:
            a = np.arange(0.0, 1.0 + step / 2, step)
            b = a
        else:
            offsets = np.arange(-window, window + 1) * step
            a = np.clip(center[0] + offsets, 0.0, 1.0)
            b = np.clip(center[1] + offsets, 0.0, 1.0)
        A, B = np.meshgrid(a, b, indexing="ij")
        C = A + B - 1.0
        obj = w[0] * (p[0] - A) ** 2 + w[1] * (p[1] - B) ** 2 + w[2] * (p[2] - C) ** 2
        obj = np.where((C >= 0.0) & (C <= 1.0), obj, np.inf)
        idx = np.unravel_index(np.argmin(obj), obj.shape)
        center = (A[idx], B[idx])
        if step <= final_step * 1.0001:
            return center[0], center[1], center[0] + center[1] - 1.0
        step /= 10


def naive_agglomerate(q: np.ndarray, threshold: float):
    """Textbook greedy merging, recomputing every linkage from scratch each step."""
    n = q.shape[0]
    clusters = [[i] for i in range(n)]
    merges = []

    def link(a, b):
        odds = [q[i, j] / (1 - q[i, j]) for i in a for j in b]
        g = math.prod(odds) ** (1 / len(odds))
        return g / (1 + g)

    while len(clusters) > 1:
        best = None
        for a, b in combinations(sorted(clusters, key=min), 2):
            prob = link(a, b)
            key = (-prob, min(a), min(b))
            if best is None or key < best[0]:
                best = (key, a, b, prob)
        _, a, b, prob = best
        if prob < threshold:
            break
        merges.append((sorted(a), sorted(b), prob))
        clusters.remove(a)
        clusters.remove(b)
        clusters.append(sorted(a + b))
    return sorted(sorted(c) for c in clusters), merges


def pair_counts_by_enumeration(pred: dict, gold: dict):
    tp = tn = fp = fn = 0
    for x, y in combinations(sorted(pred), 2):
        same_p, same_g = pred[x] == pred[y], gold[x] == gold[y]
        if same_p and same_g:
            tp += 1
        elif same_p:
            fp += 1
        elif same_g:
            fn += 1
        else:
            tn += 1
    return tp, tn, fp, fn


def random_partition_pair(rng, n_max=30):
    n = int(rng.integers(1, n_max + 1))
    items = [f"r{i}" for i in range(n)]
    k_pred = int(rng.integers(1, n + 1))
    k_gold = int(rng.integers(1, n + 1))
    pred = {x: int(rng.integers(k_pred)) for x in items}
    gold = {x: int(rng.integers(k_gold)) for x in items}
    return pred, gold
