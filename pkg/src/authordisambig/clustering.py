"""Greedy agglomerative clustering on pairwise probabilities.

Two clusters are linked by the geometric mean of the pairwise match odds
``Q/(1-Q)`` over all cross pairs. The best-linked pair is merged until the
best linkage probability drops below the stop threshold.
"""

from __future__ import annotations

import math
from collections.abc import Collection
from dataclasses import dataclass, field

import numpy as np

from .corpus import RefId
from .inference import PairProbabilityMatrix


@dataclass(frozen=True)
class MergeStep:
    left: tuple[RefId, ...]
    right: tuple[RefId, ...]
    probability: float


@dataclass
class Clustering:
    block_key: str
    clusters: list[tuple[RefId, ...]]
    merges: list[MergeStep] = field(default_factory=list)


def linkage_odds(a: Collection[int], b: Collection[int], m: PairProbabilityMatrix) -> tuple[float, float]:
    """Geometric-mean odds and the matching probability between index sets ``a`` and ``b``."""
    q = m.values[np.ix_(list(a), list(b))]
    mean_log_odds = float(np.mean(np.log(q) - np.log1p(-q)))
    odds = math.exp(mean_log_odds)
    return odds, odds / (1.0 + odds)


def agglomerate(m: PairProbabilityMatrix, stop_threshold: float = 0.5) -> Clustering:
    """Cluster one block.

    Clusters are tracked by their smallest member index; since ``m.refs`` is
    sorted this is also their smallest reference id, which gives the
    tie-break order. Cross-cluster log-odds sums are maintained incrementally,
    so each step costs one pass over the active cluster pairs.
    """
    n = m.n
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    merges: list[MergeStep] = []
    if n >= 2:
        with np.errstate(divide="ignore", invalid="ignore"):
            log_odds = np.log(m.values) - np.log1p(-m.values)
        sums = np.where(np.isnan(log_odds), 0.0, log_odds)
        sizes = np.ones(n)
        active = np.ones(n, dtype=bool)
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        while active.sum() > 1:
            mask = upper & active[:, None] & active[None, :]
            mean = np.where(mask, sums / np.outer(sizes, sizes), -np.inf)
            best = mean.max()
            prob = 1.0 / (1.0 + math.exp(-best))
            if prob < stop_threshold:
                break
            # argmax returns the first maximum in row-major order: smallest (a, b)
            a, b = divmod(int(np.argmax(mean == best)), n)
            merges.append(
                MergeStep(
                    tuple(m.refs[i] for i in members[a]),
                    tuple(m.refs[i] for i in members[b]),
                    prob,
                )
            )
            members[a] = sorted(members[a] + members.pop(b))
            sums[a, :] += sums[b, :]
            sums[:, a] += sums[:, b]
            sums[a, a] = 0.0
            sizes[a] += sizes[b]
            active[b] = False
    clusters = [tuple(m.refs[i] for i in idx) for _, idx in sorted(members.items())]
    return Clustering(m.block_key, clusters, merges)
