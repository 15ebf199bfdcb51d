"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data validation error,
3 model/schema incompatibility.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any

from .config import ConfigError, RunConfig, load_config
from .corpus import Corpus, load_corpus, load_jsonl_corpus, parse_ref_id, save_corpus
from .errors import DataError, DisambiguationError
from .inference import block_r_values, fixed_point_prior, posterior
from .metrics import evaluate, macro_average
from .pipeline import cluster_lines, disambiguate, merge_lines, read_clusters, train, write_jsonl
from .profile import Profiler, profile_index
from .synthetic import SyntheticSettings, generate
from .training import load_model, r_value, save_model


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _dump(obj: Any, path: str | Path | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    return config.override(
        seed=getattr(args, "seed", None),
        delta=getattr(args, "delta", None),
        stop_threshold=getattr(args, "stop", None),
        alpha=getattr(args, "alpha", None),
        min_count=getattr(args, "min_count", None),
        max_passes=getattr(args, "max_passes", None),
        thread_count=getattr(args, "threads", None),
    )


def _load_any_corpus(path: str, config: RunConfig) -> Corpus:
    """Accept either a corpus store or a raw JSON Lines file."""
    try:
        return load_corpus(path)
    except DataError:
        return load_jsonl_corpus(path, config.popularity_thresholds)


def cmd_ingest(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    corpus = load_jsonl_corpus(args.input, config.popularity_thresholds)
    save_corpus(corpus, args.out)
    print(f"ingested {len(corpus.records)} citations, {len(corpus)} references, {len(corpus.blocks)} blocks",
          file=sys.stderr)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    corpus = _load_any_corpus(args.corpus, config)
    model, pair_sets = train(corpus, config)
    save_model(model, args.model_out)
    print(f"trained on |M|={model.total_m} |N|={model.total_n}; checksum {model.checksum[:12]}", file=sys.stderr)
    return 0


def cmd_disambiguate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    corpus = _load_any_corpus(args.corpus, config)
    model = load_model(args.model)
    results = disambiguate(corpus, model, config)
    write_jsonl(cluster_lines(results), args.out)
    if args.emit_merges:
        write_jsonl(merge_lines(results), args.emit_merges)
    summary = {
        "config": config.to_dict(include_runtime=False),
        "model_checksum": model.checksum,
        "corpus_sha256": _file_sha256(args.corpus),
        "n_citations": len(corpus.records),
        "n_references": len(corpus),
        "n_blocks": len(corpus.blocks),
        "n_clusters": sum(len(r.clustering.clusters) for r in results),
        "residual_violations": sum(r.repair.residual_violations for r in results if r.repair),
        "blocks": [r.summary() for r in results],
    }
    _dump(summary, args.summary or f"{args.out}.summary.json")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    pred, pred_blocks = read_clusters(args.pred)
    gold, _ = read_clusters(args.gold)
    overall = evaluate(pred, gold)
    per_block = {}
    if args.per_block or args.average == "macro":
        by_block: dict[str, list[str]] = {}
        for ref, block in pred_blocks.items():
            by_block.setdefault(block, []).append(ref)
        for block, refs in sorted(by_block.items()):
            per_block[block] = evaluate({r: pred[r] for r in refs}, {r: gold[r] for r in refs if r in gold})
    report: dict[str, Any] = {"average": args.average}
    if args.average == "macro":
        report["scores"] = macro_average(per_block.values())
        report["counts"] = overall.to_dict()
    else:
        report["scores"] = overall.to_dict()
    if args.per_block:
        report["per_block"] = {k: v.to_dict() for k, v in per_block.items()}
    _dump(report, args.report_out)
    return 0


def cmd_inspect_pair(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    corpus = _load_any_corpus(args.corpus, config)
    model = load_model(args.model)
    a, b = parse_ref_id(args.ref_a), parse_ref_id(args.ref_b)
    profiler = Profiler(corpus)
    x = profiler.profile(a, b)
    block = corpus.block_of(a)
    prior, iterations = fixed_point_prior(block_r_values(block, profiler, model), config.prior_p0)
    r = r_value(model, x)
    _dump(
        {
            "refs": [args.ref_a, args.ref_b],
            "block": block.key,
            "profile": dict(zip(profiler.schema.names, x.levels)),
            "profile_index": profile_index(x),
            "r": r,
            "prior": prior,
            "prior_iterations": iterations,
            "posterior": posterior(r, prior),
        },
        None,
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    syn = generate(args.seed, SyntheticSettings())
    write_jsonl(syn.records, args.out)
    gold = [
        {"block": "", "cluster_id": f"gold/{i}", "refs": refs}
        for i, refs in enumerate(syn.gold_clusters())
    ]
    write_jsonl(gold, args.gold_out)
    return 0


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    p.add_argument("--config", help="JSON config file (or a run summary to replay)")
    flags = {
        "seed": dict(type=int),
        "delta": dict(type=float),
        "stop": dict(type=float, help="stop threshold for merging"),
        "alpha": dict(type=float),
        "min-count": dict(type=int),
        "max-passes": dict(type=int),
        "threads": dict(type=int, help="0 = one per CPU"),
    }
    for name in names:
        p.add_argument(f"--{name}", **flags[name])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="authordisambig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate JSON Lines records and write a corpus store")
    p.add_argument("input")
    p.add_argument("out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="fit the likelihood-ratio model")
    p.add_argument("corpus")
    p.add_argument("model_out")
    _add_config_flags(p, "seed", "alpha", "min-count")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("disambiguate", help="cluster every block")
    p.add_argument("corpus")
    p.add_argument("model")
    p.add_argument("out", help="clusters JSON Lines")
    p.add_argument("--summary", help="run summary path (default: <out>.summary.json)")
    p.add_argument("--emit-merges", metavar="PATH", help="write merge logs as JSON Lines")
    _add_config_flags(p, "seed", "delta", "stop", "max-passes", "threads")
    p.set_defaults(func=cmd_disambiguate)

    p = sub.add_parser("evaluate", help="score predicted clusters against gold clusters")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("report_out", nargs="?", default="-")
    p.add_argument("--per-block", action="store_true")
    p.add_argument("--average", choices=["micro", "macro"], default="micro")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inspect", help="diagnostics")
    inspect_sub = p.add_subparsers(dest="what", required=True, parser_class=_Parser)
    q = inspect_sub.add_parser("pair", help="profile, r, prior and posterior for two references")
    q.add_argument("corpus")
    q.add_argument("model")
    q.add_argument("ref_a")
    q.add_argument("ref_b")
    _add_config_flags(q)
    q.set_defaults(func=cmd_inspect_pair)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus and its gold clusters")
    p.add_argument("out")
    p.add_argument("gold_out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DisambiguationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
