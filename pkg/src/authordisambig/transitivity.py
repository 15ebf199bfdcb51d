"""Detection and weighted least-squares repair of transitivity violations.

A triplet violates transitivity when its two larger probabilities force a
lower bound on the third that the third misses by more than ``delta``:

    P_ij + P_jk - 1 > P_ik + delta,   with P_ik the smallest edge.

A violating triplet is projected onto the boundary ``Q_ik = Q_ij + Q_jk - 1``
by minimizing ``sum W (P - Q)^2`` with ``W = 1 / (P (1 - P))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DomainError
from .inference import P_MAX, P_MIN, PairProbabilityMatrix


@dataclass(frozen=True)
class TripletViolation:
    """Indices ``(i, j, k)`` into the matrix; ``(i, k)`` is the low edge."""

    i: int
    j: int
    k: int
    magnitude: float

    @property
    def refs(self) -> tuple[int, int, int]:
        return self.i, self.j, self.k


@dataclass(frozen=True)
class RepairConfig:
    delta: float = 0.05
    max_passes: int = 10
    low_weight_factor: float = 0.5

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.max_passes < 0:
            raise ValueError(f"max_passes must be non-negative, got {self.max_passes}")
        if not 0 < self.low_weight_factor <= 1:
            raise ValueError(f"low_weight_factor must lie in (0, 1], got {self.low_weight_factor}")


def _orient(a: int, b: int, c: int, p_ab: float, p_ac: float, p_bc: float):
    """Return (i, j, k, magnitude) with (i, k) the smallest edge (first one on ties)."""
    low = min(p_ab, p_ac, p_bc)
    if p_ab == low:
        return a, c, b, p_ac + p_bc - 1.0 - p_ab
    if p_ac == low:
        return a, b, c, p_ab + p_bc - 1.0 - p_ac
    return b, a, c, p_ab + p_ac - 1.0 - p_bc


def _triplet_indices(n: int) -> np.ndarray:
    if n < 3:
        return np.empty((0, 3), dtype=np.int64)
    return np.array(list(combinations(range(n), 3)), dtype=np.int64)


def detect_violations(m: PairProbabilityMatrix, delta: float = 0.05) -> list[TripletViolation]:
    """All violating triplets, largest magnitude first, then by index."""
    trip = _triplet_indices(m.n)
    if not len(trip):
        return []
    a, b, c = trip.T
    v = m.values
    edges = np.stack([v[a, b], v[a, c], v[b, c]], axis=1)
    low = edges.min(axis=1)
    magnitude = edges.sum(axis=1) - 2.0 * low - 1.0
    hits = np.flatnonzero(magnitude > delta)
    found = []
    for t in hits:
        i, j, k, mag = _orient(int(a[t]), int(b[t]), int(c[t]), *edges[t])
        if mag > delta:
            found.append(TripletViolation(i, j, k, float(mag)))
    found.sort(key=lambda x: (-x.magnitude, x.i, x.j, x.k))
    return found


def _violates(v: np.ndarray, a: int, b: int, c: int, delta: float) -> bool:
    p_ab, p_ac, p_bc = v[a, b], v[a, c], v[b, c]
    return p_ab + p_ac + p_bc - 2.0 * min(p_ab, p_ac, p_bc) - 1.0 > delta


def _violations_touching(v: np.ndarray, edges, delta: float) -> int:
    """Number of violating triplets that contain at least one of ``edges``."""
    n = v.shape[0]
    triplets = {tuple(sorted((p, q, r))) for p, q in edges for r in range(n) if r != p and r != q}
    return sum(_violates(v, *t, delta) for t in triplets)


def wls_weight(p: float) -> float:
    return 1.0 / (p * (1.0 - p))


def repair_triplet(
    p_ij: float, p_jk: float, p_ik: float, w_ij: float, w_jk: float, w_ik: float
) -> tuple[float, float, float]:
    """Closest point (in the weighted norm) on ``Q_ik = Q_ij + Q_jk - 1``.

    Returns the inputs unchanged when the triplet already satisfies the bound.
    """
    if min(w_ij, w_jk, w_ik) <= 0:
        raise DomainError("repair weights must be positive")
    lam = (p_ij + p_jk - p_ik - 1.0) / (1.0 / w_ij + 1.0 / w_jk + 1.0 / w_ik)
    if lam <= 0:
        return p_ij, p_jk, p_ik

    def clamp(q: float) -> float:
        return min(P_MAX, max(P_MIN, q))

    return clamp(p_ij - lam / w_ij), clamp(p_jk - lam / w_jk), clamp(p_ik + lam / w_ik)


@dataclass
class RepairEvent:
    pass_number: int
    triplet: tuple[int, int, int]
    before: tuple[float, float, float]
    after: tuple[float, float, float]


@dataclass
class RepairReport:
    violations_per_pass: list[int] = field(default_factory=list)
    repairs_per_pass: list[int] = field(default_factory=list)
    residual_violations: int = 0
    converged: bool = True
    rolled_back: int = 0
    events: list[RepairEvent] = field(default_factory=list)

    @property
    def passes_with_repairs(self) -> int:
        return sum(1 for r in self.repairs_per_pass if r)

    def to_dict(self) -> dict:
        return {
            "passes": len(self.violations_per_pass),
            "violations_per_pass": self.violations_per_pass,
            "repairs_per_pass": self.repairs_per_pass,
            "violations_found": sum(self.violations_per_pass),
            "violations_fixed": sum(self.repairs_per_pass),
            "residual_violations": self.residual_violations,
            "rolled_back": self.rolled_back,
            "converged": self.converged,
        }


def repair_block(
    m: PairProbabilityMatrix, config: RepairConfig = RepairConfig(), trace: bool = False
) -> tuple[PairProbabilityMatrix, RepairReport]:
    """Repair violations pass by pass until none remain or passes run out.

    Within a pass, violations are handled in detection order and each triplet
    is re-tested against the current (partly repaired) values first. From the
    second pass on, the smallest edge of each triplet has its weight scaled by
    ``config.low_weight_factor`` so that it moves more.

    A repair is rolled back when it leaves more violating triplets around
    its three edges than before, so the block's violation count never grows.
    Rolled-back triplets are retried in later passes with reduced low-edge
    weights. Running out of passes is not an error; leftovers are counted in
    ``residual_violations``. With ``trace`` every applied repair is logged.
    """
    q = m.copy()
    v = q.values
    report = RepairReport()
    pending = detect_violations(q, config.delta)
    for pass_number in range(1, config.max_passes + 1):
        if not pending:
            break
        repaired = 0
        for viol in pending:
            a, b, c = sorted(viol.refs)
            i, j, k, mag = _orient(a, b, c, v[a, b], v[a, c], v[b, c])
            if not mag > config.delta:
                continue
            before = (v[i, j], v[j, k], v[i, k])
            weights = [wls_weight(p) for p in before]
            if pass_number >= 2:
                weights[2] *= config.low_weight_factor
            after = repair_triplet(*before, *weights)
            edges = ((i, j), (j, k), (i, k))
            count_before = _violations_touching(v, edges, config.delta)
            for (p, r), value in zip(edges, after):
                v[p, r] = v[r, p] = value
            if _violations_touching(v, edges, config.delta) > count_before:
                for (p, r), value in zip(edges, before):
                    v[p, r] = v[r, p] = value
                report.rolled_back += 1
                continue
            repaired += 1
            if trace:
                report.events.append(RepairEvent(pass_number, (i, j, k), tuple(map(float, before)), after))
        report.violations_per_pass.append(len(pending))
        report.repairs_per_pass.append(repaired)
        pending = detect_violations(q, config.delta)
    report.residual_violations = len(pending)
    report.converged = not pending
    return q, report
