"""Turn likelihood ratios into pairwise same-author probabilities.

Each block gets its own prior P(M), found by iterating the mean posterior
over the block's pairs to a fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .corpus import Block, RefId
from .errors import DomainError
from .profile import Profiler
from .training import RatioModel, r_value

P_MIN = 1e-6
P_MAX = 1.0 - 1e-6
PRIOR_MIN = 1e-4
PRIOR_MAX = 0.999


def posterior(r: float, prior: float) -> float:
    """P(M | x) from the likelihood ratio ``r`` and prior ``P(M)``."""
    if not r > 0 or math.isinf(r):
        raise DomainError(f"likelihood ratio must be positive and finite, got {r}")
    if not 0 < prior < 1:
        raise DomainError(f"prior must lie in (0, 1), got {prior}")
    p = r * prior / (r * prior + (1.0 - prior))
    return min(P_MAX, max(P_MIN, p))


def _posterior_array(r: np.ndarray, prior: float) -> np.ndarray:
    return np.clip(r * prior / (r * prior + (1.0 - prior)), P_MIN, P_MAX)


@dataclass(frozen=True)
class BlockPrior:
    block_key: str
    prior: float
    iterations_used: int


def block_r_values(block: Block, profiler: Profiler, model: RatioModel) -> np.ndarray:
    """r for every pair of the block, in ``combinations(block.refs, 2)`` order."""
    return np.array(
        [r_value(model, profiler.profile(a, b), profiler.schema) for a, b in combinations(block.refs, 2)],
        dtype=float,
    )


def fixed_point_prior(
    r_values: np.ndarray, p0: float = 0.1, tol: float = 1e-4, max_iter: int = 50
) -> tuple[float, int]:
    """Iterate ``p <- mean(posterior(r, p))`` from ``p0``; returns (prior, iterations)."""
    if not 0 < p0 < 1:
        raise DomainError(f"p0 must lie in (0, 1), got {p0}")
    r_values = np.asarray(r_values, dtype=float)
    p = p0
    iterations = 0
    if r_values.size:
        while iterations < max_iter:
            iterations += 1
            p_next = float(np.mean(_posterior_array(r_values, p)))
            delta = abs(p_next - p)
            p = p_next
            if delta < tol:
                break
    return min(PRIOR_MAX, max(PRIOR_MIN, p)), iterations


def estimate_prior(
    block: Block,
    profiler: Profiler,
    model: RatioModel,
    p0: float = 0.1,
    tol: float = 1e-4,
    max_iter: int = 50,
    r_values: np.ndarray | None = None,
) -> BlockPrior:
    if r_values is None:
        r_values = block_r_values(block, profiler, model)
    prior, iterations = fixed_point_prior(r_values, p0, tol, max_iter)
    return BlockPrior(block.key, prior, iterations)


@dataclass
class PairProbabilityMatrix:
    """Symmetric matrix of pairwise probabilities over a block's references.

    ``values[i, j]`` is the probability for ``refs[i]`` and ``refs[j]``; the
    diagonal is NaN and never read.
    """

    block_key: str
    refs: tuple[RefId, ...]
    values: np.ndarray

    @classmethod
    def from_pairs(cls, block_key: str, refs, pair_values) -> PairProbabilityMatrix:
        """Build from values listed in ``combinations(range(n), 2)`` order."""
        refs = tuple(refs)
        n = len(refs)
        values = np.full((n, n), np.nan)
        iu = np.triu_indices(n, k=1)
        values[iu] = np.asarray(pair_values, dtype=float)
        values.T[iu] = values[iu]
        return cls(block_key, refs, values)

    @classmethod
    def from_dict(cls, probs: dict[tuple[int, int], float], n: int, block_key: str = "", refs=None):
        """Build from an ``{(i, j): p}`` mapping over indices; missing pairs are an error."""
        refs = tuple(refs) if refs is not None else tuple((str(i), 0) for i in range(n))
        values = np.full((n, n), np.nan)
        for (i, j), p in probs.items():
            values[i, j] = values[j, i] = p
        matrix = cls(block_key, refs, values)
        if np.isnan(matrix.upper()).any():
            raise ValueError("every pair of the block needs a probability")
        return matrix

    @property
    def n(self) -> int:
        return len(self.refs)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self.values[ij])

    def upper(self) -> np.ndarray:
        return self.values[np.triu_indices(self.n, k=1)]

    def entries(self) -> list[tuple[RefId, RefId, float]]:
        return [(self.refs[i], self.refs[j], float(self.values[i, j])) for i, j in combinations(range(self.n), 2)]

    def copy(self) -> PairProbabilityMatrix:
        return PairProbabilityMatrix(self.block_key, self.refs, self.values.copy())


def score_block(
    block: Block,
    profiler: Profiler,
    model: RatioModel,
    prior: float,
    r_values: np.ndarray | None = None,
) -> PairProbabilityMatrix:
    if not 0 < prior < 1:
        raise DomainError(f"prior must lie in (0, 1), got {prior}")
    if r_values is None:
        r_values = block_r_values(block, profiler, model)
    return PairProbabilityMatrix.from_pairs(block.key, block.refs, _posterior_array(np.asarray(r_values), prior))
