"""End-to-end training and disambiguation over a corpus."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .clustering import Clustering, agglomerate
from .config import RunConfig
from .corpus import Block, Corpus, format_ref_id, parse_ref_id
from .errors import DataError, ReferenceSetMismatch
from .inference import block_r_values, fixed_point_prior, score_block
from .profile import Profiler
from .training import (
    RatioModel,
    ReferencePairSets,
    fit_ratio_model,
    generate_match_set,
    generate_nonmatch_set,
)
from .transitivity import RepairConfig, RepairReport, repair_block


def train(corpus: Corpus, config: RunConfig = RunConfig(), profiler: Profiler | None = None):
    """Auto-generate M and N and fit the ratio model. Returns (model, pair sets)."""
    pair_sets = ReferencePairSets(
        match_pairs=generate_match_set(corpus),
        nonmatch_pairs=generate_nonmatch_set(corpus, config.seed, config.nonmatch_size),
    )
    model = fit_ratio_model(corpus, pair_sets, config.alpha, config.min_count, profiler)
    return model, pair_sets


@dataclass
class BlockResult:
    block: Block
    clustering: Clustering
    prior: float | None = None
    prior_iterations: int = 0
    repair: RepairReport | None = None

    def summary(self) -> dict[str, Any]:
        return {
            "block": self.block.key,
            "n_refs": len(self.block.refs),
            "popularity_bin": self.block.popularity_bin,
            "prior": self.prior,
            "prior_iterations": self.prior_iterations,
            "repair": self.repair.to_dict() if self.repair else None,
            "n_clusters": len(self.clustering.clusters),
            "n_merges": len(self.clustering.merges),
        }


def disambiguate_block(block: Block, profiler: Profiler, model: RatioModel, config: RunConfig) -> BlockResult:
    if len(block.refs) < 2:
        return BlockResult(block, Clustering(block.key, [tuple(block.refs)] if block.refs else []))
    r = block_r_values(block, profiler, model)
    prior, iterations = fixed_point_prior(r, config.prior_p0)
    matrix = score_block(block, profiler, model, prior, r_values=r)
    repair_cfg = RepairConfig(config.delta, config.max_passes, config.low_weight_factor)
    repaired, report = repair_block(matrix, repair_cfg)
    clustering = agglomerate(repaired, config.stop_threshold)
    return BlockResult(block, clustering, prior, iterations, report)


def resolve_threads(thread_count: int) -> int:
    return thread_count if thread_count > 0 else (os.cpu_count() or 1)


def disambiguate(corpus: Corpus, model: RatioModel, config: RunConfig = RunConfig()) -> list[BlockResult]:
    """Cluster every block; results come back in block-key order whatever the thread count."""
    profiler = Profiler(corpus)
    # warm the feature cache up front so worker threads only read it
    for ref in corpus.references:
        profiler.features(ref.ref_id)
    threads = resolve_threads(config.thread_count)
    if threads == 1:
        return [disambiguate_block(b, profiler, model, config) for b in corpus.blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: disambiguate_block(b, profiler, model, config), corpus.blocks))


def cluster_lines(results: list[BlockResult]) -> list[dict[str, Any]]:
    lines = []
    for res in results:
        for idx, cluster in enumerate(res.clustering.clusters):
            lines.append(
                {
                    "block": res.block.key,
                    "cluster_id": f"{res.block.key}/{idx}",
                    "refs": [format_ref_id(r) for r in cluster],
                }
            )
    return lines


def merge_lines(results: list[BlockResult]) -> list[dict[str, Any]]:
    return [
        {
            "block": res.block.key,
            "step": step,
            "left": [format_ref_id(r) for r in m.left],
            "right": [format_ref_id(r) for r in m.right],
            "probability": m.probability,
        }
        for res in results
        for step, m in enumerate(res.clustering.merges)
    ]


def write_jsonl(lines: list[dict[str, Any]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(json.dumps(line, sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def read_clusters(path: str | Path) -> tuple[dict[str, str], dict[str, str]]:
    """Read a cluster JSONL file into ``{ref: cluster_id}`` and ``{ref: block}``."""
    labels: dict[str, str] = {}
    blocks: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                cluster_id = str(data["cluster_id"])
                block = str(data.get("block", ""))
                refs = [str(r) for r in data["refs"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed cluster line ({exc})") from None
            for ref in refs:
                parse_ref_id(ref)
                if ref in labels:
                    raise ReferenceSetMismatch(f"{path}:{lineno}: reference {ref} listed twice")
                labels[ref] = cluster_id
                blocks[ref] = block
    return labels, blocks
