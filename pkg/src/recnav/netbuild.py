"""Materialize top-N recommendation networks and diversify them.

A network's out-edges for each item are the length-N prefix of its similarity
table row. Each diversifier replaces only the rank-N edge (the least similar
recommendation) and never touches ranks 1..N-1, so out-degrees and the
no-self-loop / no-duplicate invariants are preserved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .io_utils import write_csv
from .seeds import substream
from .similarity import KIND_RATING, SimilarityTable

log = logging.getLogger(__name__)

DIVERSIFIER_POOL_DEPTH = 50
PAPER_N_RANGE = (1, 20)


@dataclass(frozen=True)
class Provenance:
    algo: str
    diversifier: str = "none"
    seed: int | None = None
    lam: float | None = None


@dataclass
class RecNetwork:
    """Directed item graph with ranked out-edges (rank = list position + 1)."""

    n_nodes: int
    N: int
    out_edges: list[list[tuple[int, float]]]
    provenance: Provenance
    skipped_nodes: list[int] = field(default_factory=list)

    def targets(self, node: int) -> list[int]:
        return [t for t, _ in self.out_edges[node]]

    def adjacency(self) -> list[list[int]]:
        return [[t for t, _ in edges] for edges in self.out_edges]

    @property
    def n_edges(self) -> int:
        return sum(len(edges) for edges in self.out_edges)


def algo_for_features(kind: str) -> str:
    return "cf" if kind == KIND_RATING else "cb"


def build(table: SimilarityTable, N: int) -> RecNetwork:
    """Top-N network: each item's out-edges are the first N table entries.

    Degenerate items (empty similarity rows) keep an empty out-list.
    """
    if N < 1:
        raise ParameterError("N must be at least 1")
    if N > table.K:
        raise ParameterError(f"N={N} exceeds the similarity table depth K={table.K}")
    out_edges = [
        [(int(t), float(s)) for t, s in zip(ids[:N], scores[:N])]
        for ids, scores in zip(table.neighbor_ids, table.neighbor_scores)
    ]
    return RecNetwork(
        n_nodes=table.n_items,
        N=N,
        out_edges=out_edges,
        provenance=Provenance(algo=algo_for_features(table.features.kind)),
    )


def _check_diversifiable(net: RecNetwork) -> None:
    if net.N < 2:
        raise ParameterError("diversification requires N >= 2")
    if net.provenance.diversifier != "none":
        raise ParameterError("network is already diversified")


def diversify_random(net: RecNetwork, seed: int) -> RecNetwork:
    """Replace every rank-N edge with a uniformly random non-duplicate item.

    Each node draws from its own substream of ``seed`` so the per-node
    decisions are order-independent.
    """
    _check_diversifiable(net)
    out_edges = []
    skipped = []
    for node, edges in enumerate(net.out_edges):
        if len(edges) < net.N:
            out_edges.append(list(edges))
            skipped.append(node)
            continue
        retained = edges[: net.N - 1]
        excluded = {node} | {t for t, _ in retained}
        candidates = np.array([v for v in range(net.n_nodes) if v not in excluded])
        rng = substream(seed, "diversify-random", node)
        pick = int(candidates[rng.integers(len(candidates))])
        out_edges.append(retained + [(pick, float("nan"))])
    return RecNetwork(
        n_nodes=net.n_nodes,
        N=net.N,
        out_edges=out_edges,
        provenance=replace(net.provenance, diversifier="random", seed=seed),
        skipped_nodes=skipped,
    )


def diversify_ziegler(
    net: RecNetwork, table: SimilarityTable, pool_depth: int = DIVERSIFIER_POOL_DEPTH
) -> RecNetwork:
    """Replace the rank-N edge with the top-``pool_depth`` candidate that
    maximizes the mean pairwise dissimilarity (1 - cosine) to the retained
    recommendations.
    """
    _check_diversifiable(net)
    if table.K < pool_depth:
        raise ParameterError(
            f"similarity table depth K={table.K} is below the required pool depth {pool_depth}"
        )
    out_edges = []
    skipped = []
    for node, edges in enumerate(net.out_edges):
        if len(edges) < net.N:
            out_edges.append(list(edges))
            skipped.append(node)
            continue
        retained = edges[: net.N - 1]
        retained_ids = np.array([t for t, _ in retained], dtype=np.int64)
        pool_ids, pool_scores = table.pool(node, pool_depth)
        keep = ~np.isin(pool_ids, retained_ids)
        cand_ids = pool_ids[keep]
        cand_scores = pool_scores[keep]
        if len(cand_ids) < net.N:
            log.warning("node %d: pool too small (%d candidates), left unmodified", node, len(cand_ids))
            out_edges.append(list(edges))
            skipped.append(node)
            continue
        dissim = 1.0 - table.pairwise_many(cand_ids, retained_ids).mean(axis=1)
        best = np.lexsort((cand_ids, -dissim))[0]
        out_edges.append(retained + [(int(cand_ids[best]), float(cand_scores[best]))])
    return RecNetwork(
        n_nodes=net.n_nodes,
        N=net.N,
        out_edges=out_edges,
        provenance=replace(net.provenance, diversifier="diversify"),
        skipped_nodes=skipped,
    )


def diversify_exprel(
    net: RecNetwork,
    table: SimilarityTable,
    lam: float = 0.5,
    pool_depth: int = DIVERSIFIER_POOL_DEPTH,
) -> RecNetwork:
    """Replace the rank-N edge with the pool candidate that maximizes the
    one-step expanded relevance.

    Candidates are scored as (1 - lam) * rel(c) + lam * |out(c) \\ D| /
    max(1, |out(c)|), where rel rescales the candidate's cosine similarity
    to [0, 1] over the pool and D is the node itself, its retained targets
    and their out-neighbors in the undiversified network.
    """
    _check_diversifiable(net)
    if table.K < pool_depth:
        raise ParameterError(
            f"similarity table depth K={table.K} is below the required pool depth {pool_depth}"
        )
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    out_edges = []
    skipped = []
    for node, edges in enumerate(net.out_edges):
        if len(edges) < net.N:
            out_edges.append(list(edges))
            skipped.append(node)
            continue
        retained = edges[: net.N - 1]
        retained_ids = {t for t, _ in retained}
        pool_ids, pool_scores = table.pool(node, pool_depth)
        keep = ~np.isin(pool_ids, np.array(sorted(retained_ids), dtype=np.int64))
        cand_ids = pool_ids[keep]
        cand_scores = pool_scores[keep]
        if len(cand_ids) == 0:
            log.warning("node %d: empty candidate pool, left unmodified", node)
            out_edges.append(list(edges))
            skipped.append(node)
            continue
        lo, hi = float(cand_scores.min()), float(cand_scores.max())
        if hi > lo:
            rel = (cand_scores - lo) / (hi - lo)
        else:
            rel = np.ones_like(cand_scores)
        already = {node} | retained_ids
        for r in retained_ids:
            already.update(net.targets(r))
        expansion = np.empty(len(cand_ids))
        for k, c in enumerate(cand_ids):
            out_c = net.targets(int(c))
            fresh = sum(1 for v in out_c if v not in already)
            expansion[k] = fresh / max(1, len(out_c))
        score = (1.0 - lam) * rel + lam * expansion
        best = np.lexsort((cand_ids, -score))[0]
        out_edges.append(retained + [(int(cand_ids[best]), float(cand_scores[best]))])
    return RecNetwork(
        n_nodes=net.n_nodes,
        N=net.N,
        out_edges=out_edges,
        provenance=replace(net.provenance, diversifier="exprel", lam=lam),
        skipped_nodes=skipped,
    )


DIVERSIFIERS = ("none", "random", "diversify", "exprel")


def dump_network(net: RecNetwork, path) -> None:
    """Write the edge list as ``source,target,rank,score`` ordered by source and rank."""
    rows = []
    for source, edges in enumerate(net.out_edges):
        for rank, (target, score) in enumerate(edges, start=1):
            rows.append((source, target, rank, score))
    write_csv(path, ["source", "target", "rank", "score"], rows)


def network_sidecar(net: RecNetwork) -> dict:
    return {
        "n_nodes": net.n_nodes,
        "N": net.N,
        "algo": net.provenance.algo,
        "diversifier": net.provenance.diversifier,
        "seed": net.provenance.seed,
        "lambda": net.provenance.lam,
        "skipped_nodes": net.skipped_nodes,
    }
