from __future__ import annotations

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recnav.corpus import TextCorpus, generate_synthetic
from recnav.errors import ParameterError
from recnav.similarity import (
    build_similarity_table,
    cosine,
    rating_features,
    tfidf,
    tokenize,
)

from conftest import dense_features


# --- tokenizer / tf-idf -----------------------------------------------------


def test_tokenize_rules():
    assert tokenize("Alpha, beta-GAMMA_7 x 42!") == ["alpha", "beta", "gamma", "42"]


def reference_tfidf(docs: dict[int, str]) -> dict[int, dict[str, float]]:
    """Straight-from-formula oracle: tf * (ln((1+D)/(1+df)) + 1), L2-normalized."""
    tokens = {i: tokenize(text) for i, text in docs.items()}
    df = Counter()
    for toks in tokens.values():
        df.update(set(toks))
    n_docs = len(docs)
    weights = {}
    for i, toks in tokens.items():
        tf = Counter(toks)
        raw = {
            term: count * (math.log((1 + n_docs) / (1 + df[term])) + 1.0)
            for term, count in tf.items()
        }
        norm = math.sqrt(sum(w * w for w in raw.values()))
        weights[i] = {term: w / norm for term, w in raw.items()} if norm else {}
    return weights


TOY_DOCS = {
    0: "red apples and green apples",
    1: "green pears and yellow pears",
    2: "the quick brown fox",
    3: "red fox red fox red",
    4: "apples pears fox",
}


def test_tfidf_matches_formula_oracle():
    corpus = TextCorpus(docs=dict(TOY_DOCS), n_items=5)
    features = tfidf(corpus)
    expected = reference_tfidf(TOY_DOCS)
    vocab = features.vocab
    dense = features.rows.toarray()
    for i in range(5):
        for dim, term in enumerate(vocab):
            assert dense[i, dim] == pytest.approx(expected[i].get(term, 0.0), abs=1e-9)


def test_tfidf_rows_unit_norm():
    corpus = TextCorpus(docs=dict(TOY_DOCS), n_items=5)
    features = tfidf(corpus)
    norms = np.sqrt(features.rows.multiply(features.rows).sum(axis=1))
    assert np.allclose(norms, 1.0, atol=1e-9)


def test_tfidf_identical_docs_cosine_one():
    corpus = TextCorpus(docs={0: "same words here", 1: "same words here"}, n_items=2)
    features = tfidf(corpus)
    assert cosine(features.rows[0], features.rows[1]) == pytest.approx(1.0, abs=1e-12)


def test_tfidf_disjoint_docs_cosine_zero():
    corpus = TextCorpus(docs={0: "alpha beta gamma", 1: "delta epsilon zeta"}, n_items=2)
    features = tfidf(corpus)
    assert cosine(features.rows[0], features.rows[1]) == 0.0


def test_tfidf_zero_token_doc_recorded():
    corpus = TextCorpus(docs={0: "real words", 1: "! ? .", 2: "more words"}, n_items=4)
    features = tfidf(corpus)
    assert features.empty_rows == [1, 3]  # zero-token doc and missing doc
    assert features.rows[1].nnz == 0


def test_tfidf_empty_corpus_rejected():
    with pytest.raises(ParameterError):
        tfidf(TextCorpus(docs={}, n_items=3))


# --- cosine -------------------------------------------------------------------


def test_cosine_self_is_one():
    v = np.array([0.3, 0.0, 2.5, 1.0])
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal_is_zero():
    assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0


def test_cosine_known_value():
    assert cosine([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]) == pytest.approx(0.9746318, abs=1e-6)


def test_cosine_zero_vector_degenerate():
    assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=6),
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=6),
)
def test_cosine_symmetry(a, b):
    size = min(len(a), len(b))
    x, y = a[:size], b[:size]
    assert cosine(x, y) == pytest.approx(cosine(y, x), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(0.1, 5, allow_nan=False), min_size=3, max_size=6),
    st.floats(0.01, 100, allow_nan=False),
)
def test_cosine_scale_invariance(a, c):
    b = [1.0, 2.0, 0.5, 3.0, 0.1, 2.2][: len(a)]
    assert cosine(a, b) == pytest.approx(cosine([c * x for x in a], b), abs=1e-9)


# --- similarity table -----------------------------------------------------------


def test_table_trivial_argmax():
    # cos(0,1) = 0.9, cos(0,2) = 0.1, cos(1,2) = 0.5
    rows = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.9, math.sqrt(1 - 0.81), 0.0],
            [0.1, (0.5 - 0.09) / math.sqrt(1 - 0.81), 0.0],
        ]
    )
    rows[2, 2] = math.sqrt(1.0 - rows[2, 0] ** 2 - rows[2, 1] ** 2)
    table = build_similarity_table(dense_features(rows), K=1)
    assert [list(ids) for ids in table.neighbor_ids] == [[1], [0], [1]]


def test_table_tie_break_ascending_id():
    rows = np.ones((4, 3))
    table = build_similarity_table(dense_features(rows), K=2)
    assert [list(ids) for ids in table.neighbor_ids] == [[1, 2], [0, 2], [0, 1], [0, 1]]
    for scores in table.neighbor_scores:
        assert np.allclose(scores, 1.0)


def test_table_excludes_degenerate_items():
    rows = np.array([[1.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    table = build_similarity_table(dense_features(rows), K=2)
    assert table.degenerate == [1]
    assert list(table.neighbor_ids[1]) == []
    for item in (0, 2):
        assert 1 not in table.neighbor_ids[item]


def test_table_k_too_large():
    with pytest.raises(ParameterError):
        build_similarity_table(dense_features(np.ones((3, 2))), K=3)


def brute_force_table(rows: np.ndarray, K: int):
    """Per-item full sort by (-cosine, id), excluding self and zero-norm items."""
    n = rows.shape[0]
    norms = np.linalg.norm(rows, axis=1)
    out = []
    for i in range(n):
        entries = []
        for j in range(n):
            if j == i or norms[j] == 0 or norms[i] == 0:
                continue
            entries.append((float(np.dot(rows[i], rows[j]) / (norms[i] * norms[j])), j))
        entries.sort(key=lambda e: (-e[0], e[1]))
        out.append(entries[:K])
    return out


def test_table_matches_brute_force_oracle():
    rng = np.random.default_rng(7)
    rows = rng.random((200, 30)) * (rng.random((200, 30)) < 0.3)
    rows[13] = 0.0  # a degenerate item
    table = build_similarity_table(dense_features(rows), K=10)
    oracle = brute_force_table(rows, K=10)
    for i in range(200):
        assert list(table.neighbor_ids[i]) == [j for _, j in oracle[i]]
        for score, (expected, _) in zip(table.neighbor_scores[i], oracle[i]):
            assert score == pytest.approx(expected, abs=1e-9)


def test_table_prefix_nesting():
    rng = np.random.default_rng(3)
    rows = rng.random((40, 8))
    table = build_similarity_table(dense_features(rows), K=12)
    for ids in table.neighbor_ids:
        for shorter in range(1, 12):
            assert list(ids[:shorter]) == list(ids[: shorter + 1])[:shorter]


def test_table_row_scaling_leaves_order_unchanged():
    rng = np.random.default_rng(11)
    rows = rng.random((30, 6))
    scaled = rows.copy()
    scaled[4] *= 37.5
    base = build_similarity_table(dense_features(rows), K=5)
    after = build_similarity_table(dense_features(scaled), K=5)
    for i in range(30):
        assert list(base.neighbor_ids[i]) == list(after.neighbor_ids[i])


def test_table_scores_match_pairwise():
    rng = np.random.default_rng(23)
    rows = rng.random((25, 5))
    table = build_similarity_table(dense_features(rows), K=6)
    for i in range(25):
        for target, score in zip(table.neighbor_ids[i], table.neighbor_scores[i]):
            assert score == pytest.approx(table.pairwise(i, int(target)), abs=1e-9)


def test_cosine_symmetry_on_features():
    _, ratings, _ = generate_synthetic(seed=4, num_items=40, num_users=30)
    features = rating_features(ratings)
    table = build_similarity_table(features, K=10)
    rng = np.random.default_rng(0)
    for _ in range(50):
        i, j = rng.integers(40, size=2)
        assert table.pairwise(int(i), int(j)) == pytest.approx(
            table.pairwise(int(j), int(i)), abs=1e-12
        )


def test_rating_features_shape_and_empty_rows():
    _, ratings, _ = generate_synthetic(seed=8, num_items=60, num_users=25)
    features = rating_features(ratings)
    assert features.rows.shape == (60, 25)
    counts = np.diff(features.rows.indptr)
    assert features.empty_rows == [int(i) for i in np.flatnonzero(counts == 0)]
