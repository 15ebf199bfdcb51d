"""Similarity profiles for pairs of author references.

A profile is a vector of small integer levels, one per comparison dimension.
The schema is fixed so that every profile maps to a cell of a dense table
(see :func:`profile_index`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

from .corpus import Corpus, RefId, fold_text, format_ref_id
from .errors import BlockMismatch, OutOfRange, SchemaMismatch, SelfPair

SCHEMA_VERSION = 1

# title tokens shorter than two characters are dropped before this list applies
STOPWORDS = frozenset(
    """
    a an and are as at be by for from has have in into is it its of on or that
    the their these this to was were which with via using based new study
    analysis between during after under over we our not no can than two
    toward how
    """.split()
)

_TOKEN = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class ProfileSchema:
    dimensions: tuple[tuple[str, int], ...]
    version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        for name, card in self.dimensions:
            if card < 2:
                raise ValueError(f"dimension {name!r} needs cardinality >= 2")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.dimensions)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(card for _, card in self.dimensions)

    @property
    def size(self) -> int:
        return math.prod(self.cardinalities)


DEFAULT_SCHEMA = ProfileSchema(
    (
        ("title", 4),
        ("journal", 2),
        ("coauthor", 3),
        ("subject", 3),
        ("language", 3),
        ("affiliation", 3),
        ("email", 3),
        ("middle_initial", 3),
        ("suffix", 3),
        ("name_popularity", 3),
    )
)


@dataclass(frozen=True)
class SimilarityProfile:
    levels: tuple[int, ...]
    schema_version: int = SCHEMA_VERSION

    def validate(self, schema: ProfileSchema = DEFAULT_SCHEMA) -> None:
        if self.schema_version != schema.version:
            raise SchemaMismatch(
                f"profile uses schema v{self.schema_version}, expected v{schema.version}"
            )
        if len(self.levels) != len(schema.dimensions):
            raise OutOfRange(f"profile has {len(self.levels)} levels, schema has {len(schema.dimensions)}")
        for level, (name, card) in zip(self.levels, schema.dimensions):
            if not 0 <= level < card:
                raise OutOfRange(f"level {level} out of range for {name!r} (cardinality {card})")


def profile_index(x: SimilarityProfile, schema: ProfileSchema = DEFAULT_SCHEMA) -> int:
    """Mixed-radix cell index; the last dimension is least significant."""
    x.validate(schema)
    index = 0
    for level, card in zip(x.levels, schema.cardinalities):
        index = index * card + level
    return index


def profile_unindex(i: int, schema: ProfileSchema = DEFAULT_SCHEMA) -> SimilarityProfile:
    if not 0 <= i < schema.size:
        raise OutOfRange(f"profile index {i} outside [0, {schema.size})")
    levels = []
    for card in reversed(schema.cardinalities):
        i, level = divmod(i, card)
        levels.append(level)
    return SimilarityProfile(tuple(reversed(levels)), schema.version)


def title_tokens(title: str) -> frozenset[str]:
    tokens = _TOKEN.findall(fold_text(title))
    return frozenset(t for t in tokens if len(t) >= 2 and t not in STOPWORDS)


def _norm_phrase(text: str | None) -> str | None:
    if not text:
        return None
    norm = " ".join(_TOKEN.findall(fold_text(text)))
    return norm or None


def tri_state(a, b) -> int:
    """0 on mismatch, 1 when either side is absent, 2 on match."""
    if a is None or b is None:
        return 1
    return 2 if a == b else 0


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def affiliation_level(a: frozenset[str] | None, b: frozenset[str] | None) -> int:
    if a is None or b is None:
        return 0
    sim = jaccard(a, b)
    if sim < 0.2:
        return 0
    return 1 if sim <= 0.6 else 2


class ReferenceFeatures(NamedTuple):
    title: frozenset[str]
    journal: str | None
    coauthors: frozenset[str]
    subjects: frozenset[str]
    language: str | None
    affiliation: frozenset[str] | None
    email: str | None
    middle_initial: str | None
    suffix: str | None


class Profiler:
    """Computes profiles for reference pairs of one corpus.

    Per-reference features are extracted once and cached.
    """

    def __init__(self, corpus: Corpus, schema: ProfileSchema = DEFAULT_SCHEMA):
        if schema.dimensions != DEFAULT_SCHEMA.dimensions:
            raise SchemaMismatch("only the built-in profile schema can be computed")
        self.corpus = corpus
        self.schema = schema
        self._cache: dict[RefId, ReferenceFeatures] = {}

    def features(self, ref_id: RefId) -> ReferenceFeatures:
        feats = self._cache.get(ref_id)
        if feats is None:
            feats = self._cache[ref_id] = self._extract(ref_id)
        return feats

    def _extract(self, ref_id: RefId) -> ReferenceFeatures:
        ref = self.corpus.reference(ref_id)
        record = self.corpus.record(ref_id[0])
        author = record.authors[ref_id[1]]
        affiliation = None
        if author.affiliation:
            affiliation = frozenset(_TOKEN.findall(fold_text(author.affiliation))) or None
        return ReferenceFeatures(
            title=title_tokens(record.title),
            journal=_norm_phrase(record.journal),
            coauthors=frozenset(
                a.name.last for pos, a in enumerate(record.authors) if pos != ref_id[1]
            ),
            subjects=frozenset(record.subjects),
            language=record.language,
            affiliation=affiliation,
            email=author.email,
            middle_initial=ref.name.middle_initial,
            suffix=ref.name.suffix,
        )

    def levels(self, a: RefId, b: RefId, popularity_bin: int) -> tuple[int, ...]:
        fa, fb = self.features(a), self.features(b)
        return (
            min(3, len(fa.title & fb.title)),
            int(fa.journal is not None and fa.journal == fb.journal),
            min(2, len(fa.coauthors & fb.coauthors)),
            min(2, len(fa.subjects & fb.subjects)),
            tri_state(fa.language, fb.language),
            affiliation_level(fa.affiliation, fb.affiliation),
            tri_state(fa.email, fb.email),
            tri_state(fa.middle_initial, fb.middle_initial),
            tri_state(fa.suffix, fb.suffix),
            popularity_bin,
        )

    def profile(self, a: RefId, b: RefId) -> SimilarityProfile:
        """Profile of a same-block pair."""
        ref_a, ref_b = self.corpus.reference(a), self.corpus.reference(b)
        if ref_a.block_key != ref_b.block_key:
            raise BlockMismatch(
                f"{format_ref_id(a)} ({ref_a.block_key}) and {format_ref_id(b)} ({ref_b.block_key})"
                " are in different blocks"
            )
        if a == b:
            raise SelfPair(f"cannot profile {format_ref_id(a)} against itself")
        bin_ = self.corpus.block(ref_a.block_key).popularity_bin
        return SimilarityProfile(self.levels(a, b, bin_), self.schema.version)

    def cross_block_profile(self, a: RefId, b: RefId) -> SimilarityProfile:
        """Profile of a pair from different blocks, scored as if both were in ``a``'s block."""
        if a == b:
            raise SelfPair(f"cannot profile {format_ref_id(a)} against itself")
        bin_ = self.corpus.block_of(a).popularity_bin
        return SimilarityProfile(self.levels(a, b, bin_), self.schema.version)


def compute_profile(
    corpus: Corpus, a: RefId, b: RefId, schema: ProfileSchema = DEFAULT_SCHEMA
) -> SimilarityProfile:
    return Profiler(corpus, schema).profile(a, b)
