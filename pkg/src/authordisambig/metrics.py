"""Clustering evaluation against a gold partition.

Pairwise counts (TP/TN/FP/FN), accuracy and pairwise precision/recall/F1,
average cluster purity (ACP), average author purity (AAP), the K-measure,
and per-reference B-cubed precision/recall.

Partitions are accepted either as a mapping ``item -> cluster label`` or as
an iterable of clusters (iterables of items).
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyInput, ReferenceSetMismatch

Partition = Mapping[Hashable, Hashable] | Iterable[Iterable[Hashable]]


def as_labels(partition: Partition) -> dict[Hashable, Hashable]:
    """Normalize a partition to ``{item: label}``; clusters are labelled by position."""
    if isinstance(partition, Mapping):
        return dict(partition)
    labels: dict[Hashable, Hashable] = {}
    for label, cluster in enumerate(partition):
        for item in cluster:
            if item in labels:
                raise ReferenceSetMismatch(f"item {item!r} appears in more than one cluster")
            labels[item] = label
    return labels


def _aligned(pred: Partition, gold: Partition) -> tuple[list, dict, dict]:
    p, g = as_labels(pred), as_labels(gold)
    if p.keys() != g.keys():
        missing = len(g.keys() - p.keys())
        extra = len(p.keys() - g.keys())
        raise ReferenceSetMismatch(
            f"prediction and gold cover different references ({missing} missing, {extra} extra)"
        )
    return sorted(p, key=repr), p, g


def _choose2(x):
    return x * (x - 1) // 2


@dataclass(frozen=True)
class PairConfusion:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def s(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: PairConfusion) -> PairConfusion:
        return PairConfusion(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class ContingencyTable:
    """Generated clusters as rows, gold clusters as columns."""

    n_ij: np.ndarray
    n_i: np.ndarray
    g_j: np.ndarray

    @property
    def N(self) -> int:
        return int(self.n_ij.sum())

    @property
    def m_gen(self) -> int:
        return self.n_ij.shape[0]

    @property
    def m_gold(self) -> int:
        return self.n_ij.shape[1]

    @property
    def m_cor(self) -> int:
        """Generated clusters identical to some gold cluster."""
        exact = (self.n_ij == self.n_i[:, None]) & (self.n_ij == self.g_j[None, :]) & (self.n_ij > 0)
        return int(exact.sum())


def contingency_table(pred: Partition, gold: Partition) -> ContingencyTable:
    items, p, g = _aligned(pred, gold)
    rows = {lab: r for r, lab in enumerate(sorted({p[i] for i in items}, key=repr))}
    cols = {lab: c for c, lab in enumerate(sorted({g[i] for i in items}, key=repr))}
    n_ij = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for item in items:
        n_ij[rows[p[item]], cols[g[item]]] += 1
    return ContingencyTable(n_ij, n_ij.sum(axis=1), n_ij.sum(axis=0))


def pair_confusion(pred: Partition, gold: Partition) -> PairConfusion:
    t = contingency_table(pred, gold)
    same_both = int(_choose2(t.n_ij).sum())
    same_pred = int(_choose2(t.n_i).sum())
    same_gold = int(_choose2(t.g_j).sum())
    total = _choose2(t.N)
    return PairConfusion(
        tp=same_both,
        fp=same_pred - same_both,
        fn=same_gold - same_both,
        tn=total - same_pred - same_gold + same_both,
    )


def pairwise_scores(c: PairConfusion) -> tuple[float, float, float, float]:
    """Accuracy, pairwise precision, recall and F1.

    Precision (recall) is 1 when no pair is predicted (gold-)linked; F1 is 0
    when both are 0.
    """
    if c.s <= 0:
        raise EmptyInput("no reference pairs to score")
    accuracy = (c.tp + c.tn) / c.s
    pp = c.tp / (c.tp + c.fp) if c.tp + c.fp else 1.0
    pr = c.tp / (c.tp + c.fn) if c.tp + c.fn else 1.0
    pf1 = 2 * pp * pr / (pp + pr) if pp + pr else 0.0
    return accuracy, pp, pr, pf1


def purity_scores(t: ContingencyTable) -> tuple[float, float, float]:
    """ACP, AAP and K = sqrt(ACP * AAP)."""
    if t.N <= 0:
        raise EmptyInput("no references to score")
    sq = t.n_ij.astype(float) ** 2
    acp = float((sq / t.n_i[:, None]).sum() / t.N)
    aap = float((sq / t.g_j[None, :]).sum() / t.N)
    return acp, aap, math.sqrt(acp * aap)


@dataclass(frozen=True)
class BCubed:
    precision: float
    recall: float
    f1: float
    per_reference: dict


def bcubed_scores(pred: Partition, gold: Partition) -> BCubed:
    """Per-reference precision/recall averaged over all references."""
    items, p, g = _aligned(pred, gold)
    if not items:
        raise EmptyInput("no references to score")
    pred_members: dict = {}
    gold_members: dict = {}
    for item in items:
        pred_members.setdefault(p[item], set()).add(item)
        gold_members.setdefault(g[item], set()).add(item)
    per_ref = {}
    for item in items:
        v, c = pred_members[p[item]], gold_members[g[item]]
        overlap = len(v & c)
        per_ref[item] = (overlap / len(v), overlap / len(c))
    precision = sum(x[0] for x in per_ref.values()) / len(items)
    recall = sum(x[1] for x in per_ref.values()) / len(items)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return BCubed(precision, recall, f1, per_ref)


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    pp: float
    pr: float
    pf1: float
    acp: float
    aap: float
    k: float
    b3_precision: float
    b3_recall: float
    b3_f1: float
    confusion: PairConfusion
    n_references: int
    m_gold: int
    m_gen: int
    m_cor: int

    SCORE_FIELDS = ("accuracy", "pp", "pr", "pf1", "acp", "aap", "k", "b3_precision", "b3_recall", "b3_f1")

    def scores(self) -> dict[str, float]:
        return {f: getattr(self, f) for f in self.SCORE_FIELDS}

    def to_dict(self) -> dict:
        d = asdict(self)
        c = d.pop("confusion")
        d.update({"tp": c["tp"], "tn": c["tn"], "fp": c["fp"], "fn": c["fn"], "s": self.confusion.s})
        return d


def evaluate(pred: Partition, gold: Partition) -> EvaluationReport:
    table = contingency_table(pred, gold)
    conf = pair_confusion(pred, gold)
    if table.N == 1:
        # a single reference has no pairs; every score is vacuously perfect
        accuracy = pp = pr = pf1 = 1.0
    else:
        accuracy, pp, pr, pf1 = pairwise_scores(conf)
    acp, aap, k = purity_scores(table)
    b3 = bcubed_scores(pred, gold)
    return EvaluationReport(
        accuracy=accuracy,
        pp=pp,
        pr=pr,
        pf1=pf1,
        acp=acp,
        aap=aap,
        k=k,
        b3_precision=b3.precision,
        b3_recall=b3.recall,
        b3_f1=b3.f1,
        confusion=conf,
        n_references=table.N,
        m_gold=table.m_gold,
        m_gen=table.m_gen,
        m_cor=table.m_cor,
    )


def macro_average(reports: Iterable[EvaluationReport]) -> dict[str, float]:
    reports = list(reports)
    if not reports:
        raise EmptyInput("no reports to average")
    return {f: sum(getattr(r, f) for r in reports) / len(reports) for f in EvaluationReport.SCORE_FIELDS}
