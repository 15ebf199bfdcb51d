import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from authordisambig.errors import DomainError
from authordisambig.inference import (
    PairProbabilityMatrix,
    estimate_prior,
    fixed_point_prior,
    posterior,
    score_block,
)
from authordisambig.profile import Profiler
from authordisambig.training import ReferencePairSets, fit_ratio_model, generate_match_set, generate_nonmatch_set

from conftest import author, make_corpus


@pytest.mark.parametrize("r,prior,expected", [(1, 0.5, 0.5), (9, 0.1, 0.5), (3, 0.5, 0.75)])
def test_posterior_examples(r, prior, expected):
    assert posterior(r, prior) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("r,prior", [(0, 0.5), (-1, 0.5), (1, 0), (1, 1), (1, 1.5), (float("nan"), 0.5)])
def test_posterior_domain(r, prior):
    with pytest.raises(DomainError):
        posterior(r, prior)


def test_posterior_monotone_on_grid():
    # stays clear of the [1e-6, 1 - 1e-6] clamp, where the curve is flat
    rs = np.logspace(-2, 2, 60)
    ps = np.linspace(0.01, 0.99, 60)
    grid = np.array([[posterior(r, p) for p in ps] for r in rs])
    assert np.all(np.diff(grid, axis=0) > 0)
    assert np.all(np.diff(grid, axis=1) > 0)


@settings(max_examples=300)
@given(st.floats(1e-3, 1e3), st.floats(0.01, 0.99))
def test_posterior_bayes_symmetry(r, p):
    assert posterior(r, p) + posterior(1 / r, 1 - p) == pytest.approx(1.0, abs=2e-6)


def test_prior_fixed_point_at_r_one():
    prior, iterations = fixed_point_prior(np.ones(10), p0=0.1)
    assert prior == pytest.approx(0.1, abs=1e-15)
    assert iterations == 1


def test_prior_climbs_to_upper_clamp():
    prior, _ = fixed_point_prior(np.full(6, 1e6), p0=0.1)
    assert prior == 0.999


def test_prior_falls_to_lower_clamp():
    prior, _ = fixed_point_prior(np.full(6, 1e-6), p0=0.1)
    assert prior == 1e-4


def test_prior_trajectory_monotone_for_strong_evidence():
    # oracle: iterate by hand and check each step increases
    p, seen = 0.1, []
    for _ in range(5):
        p = float(np.mean([posterior(50.0, p)] * 3))
        seen.append(p)
    assert all(b > a for a, b in zip(seen, seen[1:]))
    assert fixed_point_prior(np.full(3, 50.0))[0] == 0.999


def test_prior_iteration_cap():
    prior, iterations = fixed_point_prior(np.array([1.5, 1.2]), p0=0.1, tol=1e-30, max_iter=7)
    assert iterations == 7
    assert 0.1 < prior <= 0.999


def block_fixture():
    raw = [
        {"id": "a", "title": "yeast gene networks", "journal": "J", "subjects": ["yeast"],
         "authors": [author("Smith", "John", "A", email="j@x"), author("Lee", "K")]},
        {"id": "b", "title": "yeast gene networks", "journal": "J", "subjects": ["yeast"],
         "authors": [author("Smith", "John", "A", email="j@x"), author("Lee", "K")]},
        {"id": "c", "title": "star formation", "journal": "Q",
         "authors": [author("Smith", "Jane", "B", email="q@y")]},
        {"id": "d", "title": "galaxy clusters", "journal": "Q",
         "authors": [author("Smith", "Jim"), author("Ng", "W")]},
        {"id": "e", "title": "cell walls", "authors": [author("Doe", "Al")]},
        {"id": "f", "title": "wind", "authors": [author("Roe", "Bo")]},
    ]
    corpus = make_corpus(raw)
    pairs = ReferencePairSets(generate_match_set(corpus), generate_nonmatch_set(corpus, 3, 200))
    model = fit_ratio_model(corpus, pairs)
    return corpus, model


def test_score_block_shapes_and_bounds():
    corpus, model = block_fixture()
    profiler = Profiler(corpus)
    block = corpus.block("smith_j")
    assert len(block.refs) == 4
    prior = estimate_prior(block, profiler, model)
    assert 1e-4 <= prior.prior <= 0.999
    m = score_block(block, profiler, model, prior.prior)
    assert len(m.entries()) == 6
    upper = m.upper()
    assert np.all((upper > 0) & (upper < 1))
    assert np.array_equal(m.values, m.values.T, equal_nan=True)
    # identical-metadata pair beats the prior
    assert m[0, 1] > prior.prior


def test_score_single_ref_block_is_empty():
    corpus, model = block_fixture()
    m = score_block(corpus.block("doe_a"), Profiler(corpus), model, 0.2)
    assert m.entries() == []


def test_matrix_from_dict():
    m = PairProbabilityMatrix.from_dict({(0, 1): 0.9, (0, 2): 0.5, (1, 2): 0.9}, 3)
    assert m[2, 0] == 0.5
    with pytest.raises(ValueError):
        PairProbabilityMatrix.from_dict({(0, 1): 0.9}, 3)
