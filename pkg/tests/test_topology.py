from __future__ import annotations

import numpy as np
import pytest

from recnav.errors import ParameterError
from recnav.topology import (
    BOWTIE_LABELS,
    bowtie,
    clustering_coefficient,
    eccentricities,
    membership_change,
    strongly_connected_components,
)

from conftest import net_from_adjacency, random_digraph


# --- brute-force oracles -------------------------------------------------------


def reachability(adj: list[list[int]]) -> np.ndarray:
    """Transitive closure via one BFS per source (reach[i][i] is True)."""
    n = len(adj)
    reach = np.zeros((n, n), dtype=bool)
    for source in range(n):
        stack = [source]
        reach[source, source] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not reach[source, w]:
                    reach[source, w] = True
                    stack.append(w)
    return reach


def oracle_scc_partition(adj: list[list[int]]) -> list[frozenset[int]]:
    reach = reachability(adj)
    n = len(adj)
    seen: set[int] = set()
    comps = []
    for v in range(n):
        if v in seen:
            continue
        comp = {w for w in range(n) if reach[v, w] and reach[w, v]}
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def oracle_bowtie(adj: list[list[int]]) -> list[str]:
    reach = reachability(adj)
    comps = oracle_scc_partition(adj)
    top = max(len(c) for c in comps)
    core = min((c for c in comps if len(c) == top), key=min)
    any_core = min(core)
    n = len(adj)
    labels = []
    for v in range(n):
        if v in core:
            labels.append("SCC")
        elif reach[v, any_core]:
            labels.append("IN")
        elif reach[any_core, v]:
            labels.append("OUT")
        else:
            from_in = any(
                reach[u, v] for u in range(n) if u not in core and reach[u, any_core]
            )
            to_out = any(
                reach[v, w] for w in range(n) if w not in core and reach[any_core, w]
            )
            if from_in and to_out:
                labels.append("TUBE")
            elif from_in:
                labels.append("TL_IN")
            elif to_out:
                labels.append("TL_OUT")
            else:
                labels.append("OTHER")
    return labels


def oracle_eccentricities(adj: list[list[int]], members: list[int]) -> dict[int, int]:
    """Floyd-Warshall on the subgraph induced by the SCC members."""
    index = {node: k for k, node in enumerate(members)}
    m = len(members)
    dist = np.full((m, m), np.inf)
    np.fill_diagonal(dist, 0.0)
    for node in members:
        for w in adj[node]:
            if w in index:
                dist[index[node], index[w]] = 1.0
    for k in range(m):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return {node: int(dist[index[node]].max()) for node in members}


def oracle_clustering(adj: list[list[int]]) -> float:
    n = len(adj)
    edges = {(u, v) for u, targets in enumerate(adj) for v in targets}
    total = 0.0
    for i in range(n):
        neighbors = list(dict.fromkeys(adj[i]))
        k = len(neighbors)
        if k < 2:
            continue
        realized = sum(
            1 for j in neighbors for w in neighbors if j != w and (j, w) in edges
        )
        total += realized / (k * (k - 1))
    return total / n


# --- strongly connected components -----------------------------------------------


def test_scc_directed_cycle():
    report = strongly_connected_components(net_from_adjacency([[1], [2], [0]]))
    assert report.num_scc == 1
    assert report.largest_scc_fraction == 1.0


def test_scc_path_singletons():
    report = strongly_connected_components(net_from_adjacency([[1], [2], []]))
    assert report.num_scc == 3
    assert report.largest_scc_fraction == pytest.approx(1 / 3)


def test_scc_labels_partition_and_order():
    adj = [[1], [0], [3], [2], []]
    report = strongly_connected_components(net_from_adjacency(adj))
    assert report.scc_id == [0, 0, 1, 1, 2]
    assert report.num_scc == 3


def test_scc_matches_reachability_oracle():
    rng = np.random.default_rng(31)
    adj = random_digraph(rng, 150, 0.02)
    report = strongly_connected_components(net_from_adjacency(adj))
    expected = oracle_scc_partition(adj)
    got: dict[int, set[int]] = {}
    for node, label in enumerate(report.scc_id):
        got.setdefault(label, set()).add(node)
    assert {frozenset(c) for c in got.values()} == set(expected)
    assert report.largest_scc_fraction == max(len(c) for c in expected) / 150


def test_largest_fraction_times_n_is_integral():
    rng = np.random.default_rng(2)
    adj = random_digraph(rng, 60, 0.05)
    report = strongly_connected_components(net_from_adjacency(adj))
    count = report.largest_scc_fraction * 60
    assert count == pytest.approx(round(count), abs=1e-9)


# --- clustering coefficient ---------------------------------------------------------


def test_clustering_complete_digraph():
    adj = [[v for v in range(3) if v != u] for u in range(3)]
    assert clustering_coefficient(net_from_adjacency(adj)) == 1.0


def test_clustering_out_star():
    adj = [[1, 2, 3], [], [], []]
    assert clustering_coefficient(net_from_adjacency(adj)) == 0.0


def test_clustering_matches_triple_enumeration():
    rng = np.random.default_rng(13)
    adj = random_digraph(rng, 100, 0.06)
    net = net_from_adjacency(adj)
    assert clustering_coefficient(net) == pytest.approx(oracle_clustering(adj), abs=1e-12)


# --- eccentricity --------------------------------------------------------------------


def test_eccentricity_directed_cycle():
    k = 6
    adj = [[(v + 1) % k] for v in range(k)]
    report = eccentricities(net_from_adjacency(adj))
    assert set(report.values.values()) == {k - 1}
    assert report.diameter == k - 1


def test_eccentricity_complete_digraph():
    adj = [[v for v in range(4) if v != u] for u in range(4)]
    report = eccentricities(net_from_adjacency(adj))
    assert set(report.values.values()) == {1}
    assert report.diameter == 1


def test_eccentricity_requires_nontrivial_scc():
    with pytest.raises(ParameterError, match="no meaningful eccentricity"):
        eccentricities(net_from_adjacency([[1], [2], []]))


def test_eccentricity_matches_floyd_warshall():
    rng = np.random.default_rng(41)
    adj = random_digraph(rng, 100, 0.05)
    net = net_from_adjacency(adj)
    members = strongly_connected_components(net).largest_members()
    assert len(members) >= 2
    report = eccentricities(net)
    assert report.values == oracle_eccentricities(adj, members)
    assert report.diameter <= len(members) - 1
    assert min(report.values.values()) >= 1


# --- bow-tie ---------------------------------------------------------------------------


def test_bowtie_forced_labels():
    # 3-cycle {0,1,2}, 3 -> 0, 2 -> 4
    adj = [[1], [2], [0, 4], [0], []]
    tie = bowtie(net_from_adjacency(adj))
    assert tie.label == ["SCC", "SCC", "SCC", "IN", "OUT"]
    assert tie.sizes == {"SCC": 3, "IN": 1, "OUT": 1, "TUBE": 0, "TL_IN": 0, "TL_OUT": 0, "OTHER": 0}


def test_bowtie_two_cycle_rest_other():
    adj = [[1], [0], [], [], []]
    tie = bowtie(net_from_adjacency(adj))
    assert tie.sizes["SCC"] == 2
    assert tie.sizes["OTHER"] == 3


def test_bowtie_tube_and_tendrils():
    # core {0,1}; 2 reaches the core (IN); the core reaches 3 (OUT);
    # 2->4->3 makes 4 a TUBE node; 2->5 makes 5 TL_IN; 6->3 makes 6 TL_OUT;
    # 7 is isolated (OTHER).
    adj = [[1], [0, 3], [0, 4, 5], [], [3], [], [3], []]
    tie = bowtie(net_from_adjacency(adj))
    assert tie.label == ["SCC", "SCC", "IN", "OUT", "TUBE", "TL_IN", "TL_OUT", "OTHER"]


def test_bowtie_matches_reachability_oracle():
    rng = np.random.default_rng(59)
    adj = random_digraph(rng, 150, 0.012)
    tie = bowtie(net_from_adjacency(adj))
    assert tie.label == oracle_bowtie(adj)
    assert sum(tie.sizes.values()) == 150


# --- membership change ---------------------------------------------------------------------


def test_membership_identical_networks_diagonal():
    adj = [[1], [2], [0, 3], []]
    net = net_from_adjacency(adj)
    (matrix,) = membership_change([net, net])
    assert matrix.sum() == 4
    assert np.all(matrix == np.diag(np.diag(matrix)))


def test_membership_saturation_flows_to_scc():
    chain = net_from_adjacency([[1], [2], [3], []], N=1)
    complete = net_from_adjacency([[v for v in range(4) if v != u] for u in range(4)], N=3)
    (matrix,) = membership_change([chain, complete])
    scc_col = BOWTIE_LABELS.index("SCC")
    assert matrix[:, scc_col].sum() == 4
    assert matrix.sum() == 4


def test_membership_row_sums_match_bowtie_sizes():
    rng = np.random.default_rng(8)
    nets = [net_from_adjacency(random_digraph(rng, 80, p)) for p in (0.01, 0.02, 0.05)]
    matrices = membership_change(nets)
    for net, matrix in zip(nets[:-1], matrices):
        sizes = bowtie(net).sizes
        for k, label in enumerate(BOWTIE_LABELS):
            assert matrix[k].sum() == sizes[label]


def test_membership_rejects_mismatched_node_sets():
    with pytest.raises(ParameterError, match="mismatched"):
        membership_change([net_from_adjacency([[1], []]), net_from_adjacency([[1], [2], []])])
