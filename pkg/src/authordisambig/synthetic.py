"""Seeded synthetic corpora with known author identities.

Ambiguous authors are created in groups that share a last name and first
initial. Each has a private topic vocabulary, favourite journals, subject
terms, an affiliation, an e-mail address and a circle of collaborators with
unique names. Every citation has one ambiguous author plus collaborators from
that author's circle.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from typing import Any

from .corpus import format_ref_id

_CONSONANTS = "bcdfghklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SyntheticSettings:
    n_authors: int = 200
    n_keys: int = 40
    n_citations: int = 1000
    title_dropout: float = 0.10
    email_missing: float = 0.70
    affiliation_missing: float = 0.50
    collaborators_per_author: int = 4
    topic_words_per_author: int = 12
    title_length: int = 6
    vocabulary_size: int = 800
    n_journals: int = 60
    n_subjects: int = 150
    initial_only_rate: float = 0.2
    foreign_language_rate: float = 0.1


@dataclass
class SyntheticCorpus:
    records: list[dict[str, Any]]
    # "<citation id>#<position>" -> person id
    truth: dict[str, str]
    # reference ids of the ambiguous (non-collaborator) authors
    ambiguous_refs: set[str] = field(default_factory=set)

    def gold_clusters(self, refs=None) -> list[list[str]]:
        keep = set(self.truth) if refs is None else set(refs)
        groups: dict[str, list[str]] = {}
        for ref, person in self.truth.items():
            if ref in keep:
                groups.setdefault(person, []).append(ref)
        return [sorted(g) for _, g in sorted(groups.items())]


def _word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))


def _unique_words(rng: random.Random, count: int, syllables: tuple[int, int], taken: set[str]) -> list[str]:
    words = []
    while len(words) < count:
        w = _word(rng, rng.randint(*syllables))
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


@dataclass
class _Person:
    pid: str
    last: str
    first: str
    middle: str | None
    suffix: str | None
    email: str
    affiliation: str


def generate(seed: int = 0, settings: SyntheticSettings = SyntheticSettings()) -> SyntheticCorpus:
    rng = random.Random(seed)
    s = settings
    taken: set[str] = set()
    vocab = _unique_words(rng, s.vocabulary_size, (2, 4), taken)
    journals = [f"Journal of {w.title()} {v.title()}" for w, v in zip(
        _unique_words(rng, s.n_journals, (2, 3), taken), _unique_words(rng, s.n_journals, (2, 3), taken)
    )]
    subjects = _unique_words(rng, s.n_subjects, (3, 4), taken)
    institutions = _unique_words(rng, s.n_authors, (2, 3), taken)
    key_lasts = _unique_words(rng, s.n_keys, (2, 3), taken)
    initials = [rng.choice(string.ascii_uppercase) for _ in range(s.n_keys)]

    def person(pid: str, last: str, first: str, inst: str) -> _Person:
        return _Person(
            pid=pid,
            last=last,
            first=first,
            middle=rng.choice(string.ascii_uppercase) if rng.random() < 0.7 else None,
            suffix="Jr." if rng.random() < 0.03 else None,
            email=f"{first.lower()}.{last}@{inst}.edu",
            affiliation=f"Department of {rng.choice(vocab).title()}, {inst.title()} University",
        )

    authors = []
    for a in range(s.n_authors):
        key = a % s.n_keys
        first = initials[key] + _word(rng, 2)[1:] + _word(rng, 1)
        inst = institutions[a]
        p = person(f"A{a:04d}", key_lasts[key], first.title(), inst)
        circle = [
            person(f"A{a:04d}C{c}", w, _word(rng, 2).title(), inst)
            for c, w in enumerate(_unique_words(rng, s.collaborators_per_author, (3, 4), taken))
        ]
        authors.append(
            {
                "person": p,
                "topic": rng.sample(vocab, s.topic_words_per_author),
                "journals": rng.sample(journals, 2),
                "subjects": rng.sample(subjects, 4),
                "language": "eng" if rng.random() >= s.foreign_language_rate else rng.choice(["ger", "fre", "spa"]),
                "circle": circle,
            }
        )

    def mention(p: _Person, allow_initial: bool) -> dict[str, Any]:
        first = p.first
        if allow_initial and rng.random() < s.initial_only_rate:
            first = first[0] + "."
        return {
            "last": p.last.title(),
            "first": first,
            "middle": p.middle,
            "suffix": p.suffix,
            "email": p.email if rng.random() >= s.email_missing else None,
            "affiliation": p.affiliation if rng.random() >= s.affiliation_missing else None,
        }

    records: list[dict[str, Any]] = []
    truth: dict[str, str] = {}
    ambiguous: set[str] = set()
    order = list(range(s.n_authors)) + [rng.randrange(s.n_authors) for _ in range(s.n_citations - s.n_authors)]
    rng.shuffle(order)
    for c, a in enumerate(order):
        info = authors[a]
        n_topic = s.title_length - 2
        words = [w for w in rng.sample(info["topic"], n_topic) if rng.random() >= s.title_dropout]
        words += rng.sample(vocab, 2)
        rng.shuffle(words)
        coauthors = rng.sample(info["circle"], rng.randint(1, 3))
        people = [(info["person"], True)] + [(p, False) for p in coauthors]
        rng.shuffle(people)
        cid = f"c{c:05d}"
        journal = rng.choice(info["journals"]) if rng.random() < 0.9 else rng.choice(journals)
        records.append(
            {
                "id": cid,
                "title": " ".join(words).capitalize(),
                "journal": journal,
                "authors": [mention(p, amb) for p, amb in people],
                "subjects": rng.sample(info["subjects"], rng.randint(1, 3)),
                "language": info["language"],
                "year": rng.randint(1990, 2020),
            }
        )
        for pos, (p, amb) in enumerate(people):
            ref = format_ref_id((cid, pos))
            truth[ref] = p.pid
            if amb:
                ambiguous.add(ref)
    return SyntheticCorpus(records, truth, ambiguous)
