from __future__ import annotations

import numpy as np
import pytest
from scipy import sparse

from recnav.corpus import generate_synthetic
from recnav.netbuild import Provenance, RecNetwork
from recnav.similarity import FeatureMatrix, build_similarity_table, rating_features


def net_from_adjacency(adj: list[list[int]], N: int | None = None, algo: str = "cf") -> RecNetwork:
    """Wrap a plain adjacency list as a network (scores set to 0)."""
    if N is None:
        N = max((len(t) for t in adj), default=1) or 1
    return RecNetwork(
        n_nodes=len(adj),
        N=N,
        out_edges=[[(t, 0.0) for t in targets] for targets in adj],
        provenance=Provenance(algo=algo),
    )


def random_digraph(rng: np.random.Generator, n: int, p: float) -> list[list[int]]:
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    return [list(np.flatnonzero(mask[v])) for v in range(n)]


def dense_features(rows: np.ndarray, kind: str = "rating-vector") -> FeatureMatrix:
    matrix = sparse.csr_matrix(np.asarray(rows, dtype=np.float64))
    matrix.sort_indices()
    matrix.eliminate_zeros()
    counts = np.diff(matrix.indptr)
    return FeatureMatrix(rows=matrix, kind=kind, empty_rows=[int(i) for i in np.flatnonzero(counts == 0)])


@pytest.fixture(scope="session")
def small_dataset():
    return generate_synthetic(seed=1, num_items=150, num_users=200)


@pytest.fixture(scope="session")
def small_cf_net(small_dataset):
    _, ratings, _ = small_dataset
    table = build_similarity_table(rating_features(ratings), K=50)
    from recnav.netbuild import build

    return build(table, 5), table
