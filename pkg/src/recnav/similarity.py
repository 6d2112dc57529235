"""TF-IDF features, cosine similarity, and ranked top-K neighbor tables.

Both recommendation models reduce to the same pipeline: build a sparse
item-by-feature matrix (user ratings for CF, TF-IDF term weights for CB),
then rank each item's neighbors by cosine. The table keeps a reference to its
source features so later stages can query exact pairwise similarities that
fall outside the stored top-K lists.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .corpus import ItemCatalog, RatingsMatrix, TextCorpus
from .errors import ParameterError
from .io_utils import write_csv

log = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"[0-9a-z]+")

KIND_RATING = "rating-vector"
KIND_TFIDF = "tfidf-vector"
KIND_TITLE = "title-tfidf"

# Table depth default: deep enough for both network building (N up to 20)
# and the top-50 diversification candidate pools.
DEFAULT_TABLE_DEPTH = 50


@dataclass
class TokenizerConfig:
    min_token_len: int = 2


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than the minimum."""
    min_len = (config or TokenizerConfig()).min_token_len
    return [t for t in TOKEN_RE.findall(text.lower()) if len(t) >= min_len]


@dataclass
class FeatureMatrix:
    """Sparse item-by-dimension feature rows of one kind."""

    rows: sparse.csr_matrix
    kind: str
    vocab: list[str] | None = None
    empty_rows: list[int] = field(default_factory=list)

    @property
    def n_items(self) -> int:
        return self.rows.shape[0]


def tfidf(
    corpus: TextCorpus,
    config: TokenizerConfig | None = None,
    kind: str = KIND_TFIDF,
) -> FeatureMatrix:
    """Build L2-normalized TF-IDF rows: tf is the raw term count and
    idf(t) = ln((1 + D) / (1 + df(t))) + 1 over the D supplied documents.

    Items without a document, and documents that tokenize to zero tokens,
    get zero rows and are recorded in ``empty_rows``.
    """
    if not corpus.docs:
        raise ParameterError("empty corpus")
    tokenized: dict[int, list[str]] = {}
    df: dict[str, int] = {}
    for item_id in sorted(corpus.docs):
        tokens = tokenize(corpus.docs[item_id], config)
        tokenized[item_id] = tokens
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    n_docs = len(tokenized)
    vocab = sorted(df)
    index = {term: dim for dim, term in enumerate(vocab)}
    idf = np.array(
        [np.log((1.0 + n_docs) / (1.0 + df[t])) + 1.0 for t in vocab], dtype=np.float64
    )

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    empty: list[int] = []
    zero_token_docs: list[int] = []
    for item_id in range(corpus.n_items):
        tokens = tokenized.get(item_id)
        if tokens:
            counts: dict[int, int] = {}
            for term in tokens:
                counts[index[term]] = counts.get(index[term], 0) + 1
            dims = sorted(counts)
            weights = np.array([counts[d] * idf[d] for d in dims], dtype=np.float64)
            norm = float(np.sqrt(np.dot(weights, weights)))
            indices.extend(dims)
            data.extend(weights / norm)
        else:
            empty.append(item_id)
            if tokens is not None:
                zero_token_docs.append(item_id)
        indptr.append(len(indices))
    if zero_token_docs:
        log.warning("%d documents tokenized to zero tokens: %s", len(zero_token_docs), zero_token_docs)
    rows = sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
        shape=(corpus.n_items, len(vocab)),
    )
    return FeatureMatrix(rows=rows, kind=kind, vocab=vocab, empty_rows=empty)


def title_corpus(catalog: ItemCatalog) -> TextCorpus:
    """Treat item titles as a document corpus (for title TF-IDF knowledge)."""
    return TextCorpus(docs={i: t for i, t in enumerate(catalog.titles())}, n_items=len(catalog))


def title_features(catalog: ItemCatalog, config: TokenizerConfig | None = None) -> FeatureMatrix:
    return tfidf(title_corpus(catalog), config, kind=KIND_TITLE)


def rating_features(ratings: RatingsMatrix, center: bool = False) -> FeatureMatrix:
    """Item rows are raw per-user rating vectors (columns of the ratings matrix).

    ``center`` subtracts each item's mean rating over its raters; the default
    keeps vectors raw.
    """
    rows = ratings.matrix.T.tocsr().astype(np.float64)
    if center:
        rows = rows.tolil()
        for i in range(rows.shape[0]):
            values = rows.data[i]
            if values:
                mean = sum(values) / len(values)
                rows.data[i] = [v - mean for v in values]
        rows = rows.tocsr()
    rows.sort_indices()
    rows.eliminate_zeros()
    counts = np.diff(rows.indptr)
    empty = [int(i) for i in np.flatnonzero(counts == 0)]
    return FeatureMatrix(rows=rows, kind=KIND_RATING, empty_rows=empty)


def cosine(a, b) -> float:
    """Cosine similarity of two vectors; 0 when either norm is zero."""
    if sparse.issparse(a) or sparse.issparse(b):
        a = sparse.csr_matrix(a)
        b = sparse.csr_matrix(b)
        dot = float((a @ b.T).toarray()[0, 0])
        norm_a = float(np.sqrt((a @ a.T).toarray()[0, 0]))
        norm_b = float(np.sqrt((b @ b.T).toarray()[0, 0]))
    else:
        a = np.asarray(a, dtype=np.float64).ravel()
        b = np.asarray(b, dtype=np.float64).ravel()
        dot = float(np.dot(a, b))
        norm_a = float(np.linalg.norm(a))
        norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def normalize_rows(rows: sparse.csr_matrix) -> sparse.csr_matrix:
    """Scale each row to unit L2 norm; zero rows stay zero."""
    norms = np.sqrt(np.asarray(rows.multiply(rows).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sparse.diags(inv) @ rows


@dataclass
class SimilarityTable:
    """Per-item ranked top-K neighbor lists with exact cosine scores.

    Lists are sorted by descending score with ties broken by ascending item
    id; the item itself and degenerate (zero-norm) items never appear.
    """

    neighbor_ids: list[np.ndarray]
    neighbor_scores: list[np.ndarray]
    K: int
    features: FeatureMatrix
    degenerate: list[int]
    _normalized: sparse.csr_matrix = field(repr=False, default=None)

    @property
    def n_items(self) -> int:
        return len(self.neighbor_ids)

    def pairwise(self, i: int, j: int) -> float:
        """Exact cosine between items ``i`` and ``j`` from the source features."""
        row = self._normalized[i] @ self._normalized[j].T
        return float(row.toarray()[0, 0])

    def pairwise_many(self, sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Dense cosine block between two id arrays."""
        return (self._normalized[sources] @ self._normalized[targets].T).toarray()

    def pool(self, item: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
        return self.neighbor_ids[item][:depth], self.neighbor_scores[item][:depth]


def build_similarity_table(
    features: FeatureMatrix, K: int, block_size: int = 512
) -> SimilarityTable:
    """Rank every item's top-K neighbors by cosine similarity.

    Zero-norm items get empty lists and are reported as degenerate; they are
    also excluded from every other item's candidates.
    """
    n = features.n_items
    if K < 1:
        raise ParameterError("K must be at least 1")
    if K >= n:
        raise ParameterError(f"K={K} must be smaller than the number of items ({n})")
    normalized = normalize_rows(features.rows).tocsr()
    norms = np.sqrt(np.asarray(normalized.multiply(normalized).sum(axis=1)).ravel())
    degenerate_mask = norms < 0.5
    degenerate = [int(i) for i in np.flatnonzero(degenerate_mask)]

    neighbor_ids: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * n
    neighbor_scores: list[np.ndarray] = [np.empty(0)] * n
    ids = np.arange(n)
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        scores = (normalized[start:stop] @ normalized.T).toarray()
        scores[:, degenerate_mask] = -np.inf
        for local, item in enumerate(range(start, stop)):
            if degenerate_mask[item]:
                continue
            row = scores[local].copy()
            row[item] = -np.inf
            order = np.lexsort((ids, -row))[:K]
            keep = row[order] > -np.inf
            neighbor_ids[item] = order[keep].astype(np.int64)
            neighbor_scores[item] = row[order][keep]
    if degenerate:
        log.warning("%d degenerate items have no similarity row: %s", len(degenerate), degenerate)
    return SimilarityTable(
        neighbor_ids=neighbor_ids,
        neighbor_scores=neighbor_scores,
        K=K,
        features=features,
        degenerate=degenerate,
        _normalized=normalized,
    )


def dump_similarity(table: SimilarityTable, path) -> None:
    """Audit dump: one ``source,rank,target,score`` row per table entry."""
    rows = []
    for source in range(table.n_items):
        for rank, (target, score) in enumerate(
            zip(table.neighbor_ids[source], table.neighbor_scores[source]), start=1
        ):
            rows.append((source, rank, int(target), float(score)))
    write_csv(path, ["source", "rank", "target", "score"], rows)
