"""Bibliographic records, author references and LN-FI blocks.

A citation contributes one author reference per author position. References
are grouped into blocks keyed on normalized last name plus first initial;
candidate pairs are only ever formed inside a block.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import DataError, DuplicateCitationId, EmptyLastName

CORPUS_FORMAT_VERSION = 1
DEFAULT_POPULARITY_THRESHOLDS = (5, 50)

SUFFIXES = ("jr", "sr", "ii", "iii", "iv")
_SUFFIX_ALIASES = {
    "jr": "jr",
    "junior": "jr",
    "sr": "sr",
    "senior": "sr",
    "ii": "ii",
    "2nd": "ii",
    "iii": "iii",
    "3rd": "iii",
    "iv": "iv",
    "4th": "iv",
}

_WS = re.compile(r"\s+")

RefId = tuple[str, int]


def fold_text(text: str) -> str:
    """Lowercase and strip diacritics; characters without an ASCII fold are kept."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c)).lower()


def _clean_name_part(raw: str | None) -> str:
    if not raw:
        return ""
    folded = fold_text(raw)
    # hyphens and apostrophes join ("garcia-lopez" -> "garcialopez"); other
    # punctuation separates tokens
    folded = re.sub(r"[-'’]", "", folded)
    folded = "".join(c if c.isalnum() else " " for c in folded)
    return _WS.sub(" ", folded).strip()


@dataclass(frozen=True, order=True)
class NameParts:
    last: str
    first: str = ""
    middle_initial: str | None = None
    suffix: str | None = None

    def __post_init__(self) -> None:
        if not self.last:
            raise EmptyLastName("last name must be non-empty")
        if self.middle_initial is not None and len(self.middle_initial) != 1:
            raise DataError(f"middle initial must be one character: {self.middle_initial!r}")


def normalize_name(
    raw_last: str | None,
    raw_first: str | None = "",
    raw_middle: str | None = "",
    raw_suffix: str | None = "",
) -> NameParts:
    """Normalize raw name fields.

    Case and diacritics are folded and punctuation dropped. The middle name is
    reduced to its first character and the suffix is mapped onto
    ``jr, sr, ii, iii, iv`` (unrecognized suffixes are dropped).

    Raises
    ------
    EmptyLastName
        If the last name is empty after trimming.
    """
    last = _clean_name_part(raw_last)
    if not last:
        raise EmptyLastName(f"empty last name: {raw_last!r}")
    first = _clean_name_part(raw_first)
    middle = _clean_name_part(raw_middle).replace(" ", "")
    suffix_token = _clean_name_part(raw_suffix).replace(" ", "")
    return NameParts(
        last=last,
        first=first,
        middle_initial=middle[0] if middle else None,
        suffix=_SUFFIX_ALIASES.get(suffix_token),
    )


def block_key(name: NameParts) -> str:
    return f"{name.last}_{name.first[:1]}"


def format_ref_id(ref_id: RefId) -> str:
    return f"{ref_id[0]}#{ref_id[1]}"


def parse_ref_id(text: str) -> RefId:
    cid, sep, pos = text.rpartition("#")
    if not sep or not cid or not pos.isdigit():
        raise DataError(f"malformed reference id {text!r}; expected '<citation id>#<position>'")
    return cid, int(pos)


def _clean_optional(value: Any) -> str | None:
    if value is None:
        return None
    text = _WS.sub(" ", str(value)).strip()
    return text or None


def normalize_subject(term: str) -> str:
    return _WS.sub(" ", fold_text(term)).strip()


@dataclass(frozen=True)
class AuthorEntry:
    name: NameParts
    affiliation: str | None = None
    email: str | None = None


@dataclass(frozen=True)
class CitationRecord:
    id: str
    title: str
    authors: tuple[AuthorEntry, ...]
    journal: str | None = None
    subjects: tuple[str, ...] = ()
    language: str | None = None
    year: int | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("citation id must be non-empty")
        if not self.authors:
            raise DataError(f"citation {self.id!r} has no authors")


def record_from_dict(data: Mapping[str, Any]) -> CitationRecord:
    """Build a normalized record from one decoded JSON Lines object.

    Unknown fields are ignored and missing optional fields become absent.
    """
    if not isinstance(data, Mapping):
        raise DataError("record must be a JSON object")
    cid = data.get("id")
    if cid is None or str(cid).strip() == "":
        raise DataError("record is missing 'id'")
    cid = str(cid)
    raw_authors = data.get("authors") or []
    if not isinstance(raw_authors, list):
        raise DataError(f"citation {cid!r}: 'authors' must be a list")
    authors = []
    for position, raw in enumerate(raw_authors):
        if not isinstance(raw, Mapping):
            raise DataError(f"citation {cid!r}: author {position} must be an object")
        try:
            name = normalize_name(raw.get("last"), raw.get("first"), raw.get("middle"), raw.get("suffix"))
        except EmptyLastName as exc:
            raise EmptyLastName(f"citation {cid!r}, author {position}: {exc}") from None
        email = _clean_optional(raw.get("email"))
        authors.append(
            AuthorEntry(
                name=name,
                affiliation=_clean_optional(raw.get("affiliation")),
                email=email.lower() if email else None,
            )
        )
    subjects: list[str] = []
    for term in data.get("subjects") or []:
        norm = normalize_subject(str(term))
        if norm and norm not in subjects:
            subjects.append(norm)
    language = _clean_optional(data.get("language"))
    year = data.get("year")
    if year is not None:
        try:
            year = int(year)
        except (TypeError, ValueError):
            raise DataError(f"citation {cid!r}: year must be an integer, got {year!r}") from None
    return CitationRecord(
        id=cid,
        title=str(data.get("title") or ""),
        journal=_clean_optional(data.get("journal")),
        authors=tuple(authors),
        subjects=tuple(subjects),
        language=language.lower() if language else None,
        year=year,
    )


def record_to_dict(record: CitationRecord) -> dict[str, Any]:
    return {
        "id": record.id,
        "title": record.title,
        "journal": record.journal,
        "authors": [
            {
                "last": a.name.last,
                "first": a.name.first,
                "middle": a.name.middle_initial,
                "suffix": a.name.suffix,
                "affiliation": a.affiliation,
                "email": a.email,
            }
            for a in record.authors
        ],
        "subjects": list(record.subjects),
        "language": record.language,
        "year": record.year,
    }


def read_records(path: str | Path) -> list[CitationRecord]:
    """Read a JSON Lines file of citation records; blank lines are skipped."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            try:
                records.append(record_from_dict(data))
            except DataError as exc:
                raise type(exc)(f"{path}:{lineno}: {exc}") from None
    return records


@dataclass(frozen=True)
class AuthorReference:
    ref_id: RefId
    name: NameParts
    block_key: str


@dataclass(frozen=True)
class Block:
    key: str
    refs: tuple[RefId, ...]
    popularity_bin: int


def popularity_bin(size: int, thresholds: tuple[int, int] = DEFAULT_POPULARITY_THRESHOLDS) -> int:
    t1, t2 = thresholds
    if size <= t1:
        return 0
    if size <= t2:
        return 1
    return 2


def iter_references(records: Iterable[CitationRecord]) -> Iterator[AuthorReference]:
    for record in records:
        for position, author in enumerate(record.authors):
            yield AuthorReference((record.id, position), author.name, block_key(author.name))


def build_blocks(
    records: Iterable[CitationRecord],
    popularity_thresholds: tuple[int, int] = DEFAULT_POPULARITY_THRESHOLDS,
) -> list[Block]:
    """Partition all author references into LN-FI blocks, sorted by key."""
    t1, t2 = popularity_thresholds
    if not 0 <= t1 <= t2:
        raise DataError(f"popularity thresholds must satisfy 0 <= t1 <= t2, got {popularity_thresholds}")
    seen: set[str] = set()
    grouped: dict[str, list[RefId]] = defaultdict(list)
    for record in records:
        if record.id in seen:
            raise DuplicateCitationId(f"duplicate citation id {record.id!r}")
        seen.add(record.id)
        for ref in iter_references([record]):
            grouped[ref.block_key].append(ref.ref_id)
    return [
        Block(key, tuple(sorted(refs)), popularity_bin(len(refs), popularity_thresholds))
        for key, refs in sorted(grouped.items())
    ]


@dataclass
class Corpus:
    """Records plus their derived references and blocks.

    Treated as immutable once built; lookups are by citation id, reference id
    and block key.
    """

    records: tuple[CitationRecord, ...]
    popularity_thresholds: tuple[int, int] = DEFAULT_POPULARITY_THRESHOLDS
    blocks: list[Block] = field(init=False)
    _by_id: dict[str, CitationRecord] = field(init=False, repr=False)
    _refs: dict[RefId, AuthorReference] = field(init=False, repr=False)
    _blocks_by_key: dict[str, Block] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.records = tuple(self.records)
        self.popularity_thresholds = tuple(self.popularity_thresholds)  # type: ignore[assignment]
        self.blocks = build_blocks(self.records, self.popularity_thresholds)
        self._by_id = {r.id: r for r in self.records}
        self._refs = {ref.ref_id: ref for ref in iter_references(self.records)}
        self._blocks_by_key = {b.key: b for b in self.blocks}

    def record(self, citation_id: str) -> CitationRecord:
        return self._by_id[citation_id]

    def reference(self, ref_id: RefId) -> AuthorReference:
        try:
            return self._refs[ref_id]
        except KeyError:
            raise DataError(f"unknown reference {format_ref_id(ref_id)!r}") from None

    def block(self, key: str) -> Block:
        return self._blocks_by_key[key]

    def block_of(self, ref_id: RefId) -> Block:
        return self._blocks_by_key[self.reference(ref_id).block_key]

    def author(self, ref_id: RefId) -> AuthorEntry:
        cid, position = ref_id
        return self._by_id[cid].authors[position]

    @property
    def references(self) -> list[AuthorReference]:
        return [self._refs[r] for b in self.blocks for r in b.refs]

    def __len__(self) -> int:
        return len(self._refs)


def load_jsonl_corpus(path: str | Path, popularity_thresholds=DEFAULT_POPULARITY_THRESHOLDS) -> Corpus:
    return Corpus(read_records(path), popularity_thresholds)


def corpus_to_dict(corpus: Corpus) -> dict[str, Any]:
    return {
        "format_version": CORPUS_FORMAT_VERSION,
        "popularity_thresholds": list(corpus.popularity_thresholds),
        "records": [record_to_dict(r) for r in corpus.records],
        "blocks": [
            {"key": b.key, "refs": [format_ref_id(r) for r in b.refs], "popularity_bin": b.popularity_bin}
            for b in corpus.blocks
        ],
    }


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(corpus_to_dict(corpus), fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus store written by :func:`save_corpus`.

    Blocks are rebuilt from the records and checked against the stored ones.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a corpus store ({exc.msg})") from None
    if not isinstance(data, dict) or data.get("format_version") != CORPUS_FORMAT_VERSION:
        version = data.get("format_version") if isinstance(data, dict) else None
        raise DataError(f"{path}: unsupported corpus format_version {version!r}")
    records = [record_from_dict(r) for r in data.get("records", [])]
    corpus = Corpus(records, tuple(data.get("popularity_thresholds", DEFAULT_POPULARITY_THRESHOLDS)))
    if "blocks" in data and corpus_to_dict(corpus)["blocks"] != data["blocks"]:
        raise DataError(f"{path}: stored blocks disagree with records")
    return corpus
