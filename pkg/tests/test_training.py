import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from authordisambig.errors import (
    CorruptModel,
    EmptyTrainingSet,
    FormatVersionUnsupported,
    InsufficientBlocks,
    SchemaMismatch,
)
from authordisambig.profile import DEFAULT_SCHEMA, SimilarityProfile, profile_index, profile_unindex
from authordisambig.training import (
    RatioModel,
    ReferencePairSets,
    fit_ratio_model,
    generate_match_set,
    generate_nonmatch_set,
    load_model,
    model_checksum,
    r_value,
    save_model,
)

from conftest import author, make_corpus

CARDS = DEFAULT_SCHEMA.cardinalities


def uniform_model(full_m=None, full_n=None, total=100, alpha=0.5, min_count=5):
    # per-dimension counts spread evenly so every backoff factor is 1
    dims = [[total // c + (1 if lvl < total % c else 0) for lvl in range(c)] for c in CARDS]
    return RatioModel(
        schema_version=1,
        alpha=alpha,
        min_count=min_count,
        total_m=total,
        total_n=total,
        full_counts_m=full_m or {},
        full_counts_n=full_n or {},
        dim_counts_m=[list(r) for r in dims],
        dim_counts_n=[list(r) for r in dims],
    )


X = SimilarityProfile((2, 1, 1, 0, 2, 0, 1, 2, 1, 0))


def test_r_value_full_table():
    idx = profile_index(X)
    model = uniform_model({idx: 8}, {idx: 2})
    assert r_value(model, X) == pytest.approx((8.5 / 101) / (2.5 / 101), rel=1e-12)
    assert r_value(model, X) == pytest.approx(3.4, rel=1e-12)


def test_r_value_backoff_symmetric_evidence():
    assert r_value(uniform_model(), X) == pytest.approx(1.0, abs=1e-12)


def test_r_value_backoff_formula():
    model = uniform_model()
    model.dim_counts_m[0] = [10, 20, 30, 40]
    model.dim_counts_n[0] = [40, 30, 20, 10]
    x = SimilarityProfile((3,) + (0,) * 9)
    expected = ((40 + 0.5) / (100 + 0.5 * 4)) / ((10 + 0.5) / (100 + 0.5 * 4))
    assert r_value(model, x) == pytest.approx(expected, rel=1e-12)


def test_r_value_clamped():
    model = uniform_model()
    model.dim_counts_m = [[0] * (c - 1) + [100] for c in CARDS]
    model.dim_counts_n = [[100] + [0] * (c - 1) for c in CARDS]
    top = SimilarityProfile(tuple(c - 1 for c in CARDS))
    assert r_value(model, top) == 1e6
    assert r_value(model, SimilarityProfile((0,) * 10)) == 1e-6


def test_r_value_schema_mismatch():
    with pytest.raises(SchemaMismatch):
        r_value(uniform_model(), SimilarityProfile(X.levels, schema_version=2))


counts = st.integers(min_value=0, max_value=50)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=0, max_value=DEFAULT_SCHEMA.size - 1),
    counts,
    counts,
    st.lists(st.tuples(counts, counts), min_size=10, max_size=10),
    st.integers(min_value=1, max_value=20),
)
def test_swapping_sets_inverts_r(idx, cm, cn, dim_pairs, min_count):
    x = profile_unindex(idx)
    model = uniform_model({idx: cm}, {idx: cn}, min_count=min_count)
    for d, (a, b) in enumerate(dim_pairs):
        model.dim_counts_m[d][x.levels[d]] = a
        model.dim_counts_n[d][x.levels[d]] = b
    r = r_value(model, x)
    r_swapped = r_value(model.swapped(), x)
    assert r > 0
    if 1e-6 < r < 1e6:
        assert r * r_swapped == pytest.approx(1.0, rel=1e-12)


def test_backoff_consistency():
    idx = profile_index(X)
    strict = uniform_model({idx: 80}, {idx: 20}, total=1000, min_count=10**9)
    assert r_value(strict, X) == pytest.approx(1.0, abs=1e-12)  # per-dimension product only
    loose = uniform_model({idx: 800}, {idx: 200}, total=1000, min_count=1)
    assert r_value(loose, X) == pytest.approx(800.5 / 200.5, rel=1e-12)


def rare_block_corpus():
    return make_corpus(
        [
            {"id": "a", "title": "t", "authors": [author("Smith", "John", "A", email="js@x.org")]},
            {"id": "b", "title": "t", "authors": [author("Smith", "John", "A")]},
            {"id": "c", "title": "t", "authors": [author("Smith", "J", "A", email="js@x.org")]},
            {"id": "d", "title": "t", "authors": [author("Smith", "John", "B")]},
            {"id": "e", "title": "t", "authors": [author("Doe", "Ann")]},
        ]
    )


def test_match_set_rules():
    pairs = set(generate_match_set(rare_block_corpus()))
    assert (("a", 0), ("c", 0)) in pairs  # shared e-mail
    assert (("a", 0), ("b", 0)) in pairs  # full first name + middle agree in a rare block
    assert (("b", 0), ("c", 0)) not in pairs  # initial only
    assert (("a", 0), ("d", 0)) not in pairs  # middle initials differ


def test_match_set_common_block_needs_email():
    raw = [{"id": f"c{i}", "title": "t", "authors": [author("Lee", "Kim", "A")]} for i in range(60)]
    raw[0]["authors"][0]["email"] = raw[1]["authors"][0]["email"] = "k@lee.org"
    pairs = generate_match_set(make_corpus(raw))
    assert pairs == [(("c0", 0), ("c1", 0))]


def test_nonmatch_set_deterministic_and_cross_block():
    corpus = rare_block_corpus()
    first = generate_nonmatch_set(corpus, seed=42, size=1000)
    second = generate_nonmatch_set(corpus, seed=42, size=1000)
    assert len(first) == 1000
    assert json.dumps(first) == json.dumps(second)
    for a, b in first:
        assert corpus.reference(a).name.last != corpus.reference(b).name.last
    assert generate_nonmatch_set(corpus, seed=43, size=1000) != first
    assert generate_nonmatch_set(corpus, seed=1, size=0) == []


def test_nonmatch_set_needs_two_blocks():
    corpus = make_corpus([{"id": "a", "title": "t", "authors": [author("Smith", "J")]}])
    with pytest.raises(InsufficientBlocks):
        generate_nonmatch_set(corpus, 0, 10)


def fitted(corpus=None, seed=0, size=100):
    corpus = corpus or rare_block_corpus()
    pairs = ReferencePairSets(generate_match_set(corpus), generate_nonmatch_set(corpus, seed, size))
    return fit_ratio_model(corpus, pairs), pairs


def test_fit_conserves_counts():
    model, pairs = fitted()
    assert model.total_m == len(pairs.match_pairs)
    assert model.total_n == 100
    assert sum(model.full_counts_m.values()) == model.total_m
    assert sum(model.full_counts_n.values()) == model.total_n
    for row_m, row_n in zip(model.dim_counts_m, model.dim_counts_n):
        assert sum(row_m) == model.total_m and sum(row_n) == model.total_n


def test_identical_match_profiles_fill_one_cell():
    corpus = rare_block_corpus()
    pairs = ReferencePairSets([(("a", 0), ("b", 0))] * 5, generate_nonmatch_set(corpus, 0, 10))
    model = fit_ratio_model(corpus, pairs)
    assert len(model.full_counts_m) == 1 and model.total_m == 5


def test_fit_requires_both_sets():
    corpus = rare_block_corpus()
    with pytest.raises(EmptyTrainingSet):
        fit_ratio_model(corpus, ReferencePairSets([], [(("a", 0), ("e", 0))]))
    with pytest.raises(EmptyTrainingSet):
        fit_ratio_model(corpus, ReferencePairSets([(("a", 0), ("b", 0))], []))


def test_model_bytes_deterministic(tmp_path):
    save_model(fitted(seed=5)[0], tmp_path / "a.json")
    save_model(fitted(seed=5)[0], tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_save_load_round_trip(tmp_path):
    model, _ = fitted()
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded == model
    assert loaded.checksum == model.checksum == model_checksum(loaded)
    data = json.loads(path.read_text())
    assert set(data) == {
        "format_version", "schema_version", "alpha", "min_count", "total_m", "total_n",
        "full_counts_m", "full_counts_n", "dim_counts_m", "dim_counts_n", "checksum",
    }


def test_load_truncated_model(tmp_path):
    path = tmp_path / "model.json"
    save_model(fitted()[0], path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(CorruptModel):
        load_model(path)


def test_load_tampered_model(tmp_path):
    path = tmp_path / "model.json"
    save_model(fitted()[0], path)
    data = json.loads(path.read_text())
    data["total_m"] += 1
    path.write_text(json.dumps(data))
    with pytest.raises(CorruptModel):
        load_model(path)


def test_load_unknown_format_version(tmp_path):
    path = tmp_path / "model.json"
    save_model(fitted()[0], path)
    data = json.loads(path.read_text())
    data["format_version"] = 99
    path.write_text(json.dumps(data))
    with pytest.raises(FormatVersionUnsupported):
        load_model(path)


def test_saturated_profile_gets_high_r():
    model, _ = fitted()
    assert math.isfinite(r_value(model, X))
