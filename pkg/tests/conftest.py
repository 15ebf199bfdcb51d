from __future__ import annotations

import pytest

from authordisambig.corpus import Corpus, record_from_dict

ACCEPTANCE_LINES: list[str] = []


def author(last, first="", middle=None, suffix=None, affiliation=None, email=None):
    return {
        "last": last,
        "first": first,
        "middle": middle,
        "suffix": suffix,
        "affiliation": affiliation,
        "email": email,
    }


def make_corpus(raw_records, thresholds=(5, 50)) -> Corpus:
    return Corpus([record_from_dict(r) for r in raw_records], thresholds)


@pytest.fixture
def three_record_raw():
    return [
        {"id": "p1", "title": "Gene networks in yeast", "authors": [author("Smith", "J.")]},
        {"id": "p2", "title": "Yeast gene regulation", "authors": [author("Smith", "J.")]},
        {"id": "p3", "title": "Protein folding", "authors": [author("Doe", "A.")]},
    ]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
