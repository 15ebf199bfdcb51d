"""Training-pair generation and the likelihood-ratio model.

The match set comes from within-block pairs that are almost certainly the
same person (shared e-mail, or full-name agreement inside a rare block). The
non-match set is sampled across blocks with different last names. Profile
counts over both sets give the ratio ``P(x|M) / P(x|N)``; cells with too
little support fall back to a product of per-dimension ratios.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any

from .corpus import Corpus, RefId
from .errors import CorruptModel, EmptyTrainingSet, FormatVersionUnsupported, InsufficientBlocks, SchemaMismatch
from .profile import DEFAULT_SCHEMA, Profiler, ProfileSchema, SimilarityProfile, profile_index

MODEL_FORMAT_VERSION = 1
R_MIN = 1e-6
R_MAX = 1e6

Pair = tuple[RefId, RefId]


@dataclass(frozen=True)
class ReferencePairSets:
    match_pairs: list[Pair]
    nonmatch_pairs: list[Pair]


def _full_first_name_agrees(a, b) -> bool:
    return (
        len(a.first) > 1
        and a.first == b.first
        and a.middle_initial == b.middle_initial
        and a.suffix == b.suffix
    )


def generate_match_set(corpus: Corpus) -> list[Pair]:
    """Within-block pairs sharing an e-mail, or agreeing on full name in a rare block."""
    pairs = []
    for block in corpus.blocks:
        for a, b in combinations(block.refs, 2):
            email_a = corpus.author(a).email
            if email_a is not None and email_a == corpus.author(b).email:
                pairs.append((a, b))
            elif block.popularity_bin == 0 and _full_first_name_agrees(
                corpus.reference(a).name, corpus.reference(b).name
            ):
                pairs.append((a, b))
    return pairs


def generate_nonmatch_set(corpus: Corpus, seed: int, size: int) -> list[Pair]:
    """Sample ``size`` ordered cross-block pairs whose last names differ.

    Sampling is uniform with replacement over such pairs (rejection sampling
    from uniformly drawn reference pairs) and fully determined by ``seed``.
    """
    refs = [r for block in corpus.blocks for r in block.refs]
    lasts = [corpus.reference(r).name.last for r in refs]
    if len(corpus.blocks) < 2 or len(set(lasts)) < 2:
        raise InsufficientBlocks("non-match sampling needs at least two blocks with different last names")
    if size < 0:
        raise ValueError(f"size must be non-negative, got {size}")
    rng = random.Random(seed)
    n = len(refs)
    pairs = []
    while len(pairs) < size:
        i = rng.randrange(n)
        j = rng.randrange(n)
        if lasts[i] != lasts[j]:
            pairs.append((refs[i], refs[j]))
    return pairs


@dataclass
class RatioModel:
    schema_version: int
    alpha: float
    min_count: int
    total_m: int
    total_n: int
    full_counts_m: dict[int, int]
    full_counts_n: dict[int, int]
    dim_counts_m: list[list[int]]
    dim_counts_n: list[list[int]]
    checksum: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.dim_counts_m)

    def swapped(self) -> RatioModel:
        """The same model with the roles of M and N exchanged."""
        return RatioModel(
            schema_version=self.schema_version,
            alpha=self.alpha,
            min_count=self.min_count,
            total_m=self.total_n,
            total_n=self.total_m,
            full_counts_m=dict(self.full_counts_n),
            full_counts_n=dict(self.full_counts_m),
            dim_counts_m=[list(r) for r in self.dim_counts_n],
            dim_counts_n=[list(r) for r in self.dim_counts_m],
        )


def count_profiles(profiles: list[SimilarityProfile], schema: ProfileSchema = DEFAULT_SCHEMA):
    full: dict[int, int] = {}
    dims = [[0] * card for card in schema.cardinalities]
    for x in profiles:
        idx = profile_index(x, schema)
        full[idx] = full.get(idx, 0) + 1
        for d, level in enumerate(x.levels):
            dims[d][level] += 1
    return full, dims


def fit_ratio_model(
    corpus: Corpus,
    pair_sets: ReferencePairSets,
    alpha: float = 0.5,
    min_count: int = 5,
    profiler: Profiler | None = None,
) -> RatioModel:
    if not pair_sets.match_pairs:
        raise EmptyTrainingSet("match set M is empty")
    if not pair_sets.nonmatch_pairs:
        raise EmptyTrainingSet("non-match set N is empty")
    profiler = profiler or Profiler(corpus)
    schema = profiler.schema
    m_profiles = [profiler.profile(a, b) for a, b in pair_sets.match_pairs]
    n_profiles = [profiler.cross_block_profile(a, b) for a, b in pair_sets.nonmatch_pairs]
    full_m, dims_m = count_profiles(m_profiles, schema)
    full_n, dims_n = count_profiles(n_profiles, schema)
    model = RatioModel(
        schema_version=schema.version,
        alpha=float(alpha),
        min_count=int(min_count),
        total_m=len(m_profiles),
        total_n=len(n_profiles),
        full_counts_m=dict(sorted(full_m.items())),
        full_counts_n=dict(sorted(full_n.items())),
        dim_counts_m=dims_m,
        dim_counts_n=dims_n,
    )
    model.checksum = model_checksum(model)
    return model


def r_value(model: RatioModel, x: SimilarityProfile, schema: ProfileSchema = DEFAULT_SCHEMA) -> float:
    """Smoothed likelihood ratio for profile ``x``, clamped to [1e-6, 1e6]."""
    if x.schema_version != model.schema_version:
        raise SchemaMismatch(
            f"model was trained on schema v{model.schema_version}, profile is v{x.schema_version}"
        )
    idx = profile_index(x, schema)
    a = model.alpha
    c_m = model.full_counts_m.get(idx, 0)
    c_n = model.full_counts_n.get(idx, 0)
    if c_m + c_n >= model.min_count:
        r = ((c_m + a) / (model.total_m + 2 * a)) / ((c_n + a) / (model.total_n + 2 * a))
    else:
        r = 1.0
        for d, level in enumerate(x.levels):
            card = len(model.dim_counts_m[d])
            p_m = (model.dim_counts_m[d][level] + a) / (model.total_m + a * card)
            p_n = (model.dim_counts_n[d][level] + a) / (model.total_n + a * card)
            r *= p_m / p_n
    return min(R_MAX, max(R_MIN, r))


def _payload(model: RatioModel) -> dict[str, Any]:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_version": model.schema_version,
        "alpha": model.alpha,
        "min_count": model.min_count,
        "total_m": model.total_m,
        "total_n": model.total_n,
        "full_counts_m": {str(k): v for k, v in sorted(model.full_counts_m.items())},
        "full_counts_n": {str(k): v for k, v in sorted(model.full_counts_n.items())},
        "dim_counts_m": model.dim_counts_m,
        "dim_counts_n": model.dim_counts_n,
    }


def _canonical(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def model_checksum(model: RatioModel) -> str:
    return hashlib.sha256(_canonical(_payload(model)).encode()).hexdigest()


def save_model(model: RatioModel, path: str | Path) -> None:
    payload = _payload(model)
    payload["checksum"] = hashlib.sha256(_canonical(payload).encode()).hexdigest()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_canonical(payload))
        fh.write("\n")


def load_model(path: str | Path) -> RatioModel:
    """Read a model file, verifying its format version and checksum.

    Raises
    ------
    FormatVersionUnsupported
        The file declares a ``format_version`` other than the current one.
    CorruptModel
        The file is not valid JSON, misses fields, or fails its checksum.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: unreadable model file ({exc.msg})") from None
    if not isinstance(data, dict):
        raise CorruptModel(f"{path}: model file must hold a JSON object")
    version = data.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise FormatVersionUnsupported(f"{path}: model format_version {version!r} is not supported")
    stored = data.pop("checksum", None)
    if stored != hashlib.sha256(_canonical(data).encode()).hexdigest():
        raise CorruptModel(f"{path}: checksum mismatch")
    try:
        model = RatioModel(
            schema_version=int(data["schema_version"]),
            alpha=float(data["alpha"]),
            min_count=int(data["min_count"]),
            total_m=int(data["total_m"]),
            total_n=int(data["total_n"]),
            full_counts_m={int(k): int(v) for k, v in data["full_counts_m"].items()},
            full_counts_n={int(k): int(v) for k, v in data["full_counts_n"].items()},
            dim_counts_m=[[int(c) for c in row] for row in data["dim_counts_m"]],
            dim_counts_n=[[int(c) for c in row] for row in data["dim_counts_n"]],
            checksum=stored,
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorruptModel(f"{path}: malformed model ({exc})") from None
    if sum(model.full_counts_m.values()) != model.total_m or sum(model.full_counts_n.values()) != model.total_n:
        raise CorruptModel(f"{path}: counts do not sum to totals")
    return model
