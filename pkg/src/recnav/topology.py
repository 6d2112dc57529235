"""Reachability analytics: components, clustering, eccentricity, bow-tie.

All operations run on plain adjacency lists extracted from a network; graphs
are treated as immutable. Component labels are deterministic (ordered by
smallest member id) so repeated runs and cross-checks agree exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .netbuild import RecNetwork

BOWTIE_LABELS = ("SCC", "IN", "OUT", "TUBE", "TL_IN", "TL_OUT", "OTHER")


@dataclass
class ComponentReport:
    num_scc: int
    largest_scc_fraction: float
    scc_id: list[int]
    clustering_coefficient: float

    def largest_members(self) -> list[int]:
        sizes: dict[int, int] = {}
        for label in self.scc_id:
            sizes[label] = sizes.get(label, 0) + 1
        top = max(sizes.values())
        best = min(label for label, size in sizes.items() if size == top)
        return [node for node, label in enumerate(self.scc_id) if label == best]


@dataclass
class BowTie:
    label: list[str]
    sizes: dict[str, int]


@dataclass
class EccentricityReport:
    values: dict[int, int]
    diameter: int

    def histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for v in self.values.values():
            hist[v] = hist.get(v, 0) + 1
        return dict(sorted(hist.items()))


def _tarjan_components(adj: list[list[int]]) -> list[list[int]]:
    """Iterative Tarjan; returns components as node lists."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            v, edge_i = work[-1]
            if edge_i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            advanced = False
            targets = adj[v]
            i = edge_i
            while i < len(targets):
                w = targets[i]
                i += 1
                if index[w] == -1:
                    work[-1] = (v, i)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return components


def strongly_connected_components(net: RecNetwork) -> ComponentReport:
    """Exact SCC partition with components labeled by ascending smallest member id."""
    adj = net.adjacency()
    components = _tarjan_components(adj)
    components.sort(key=min)
    scc_id = [0] * net.n_nodes
    largest = 0
    for label, comp in enumerate(components):
        largest = max(largest, len(comp))
        for node in comp:
            scc_id[node] = label
    return ComponentReport(
        num_scc=len(components),
        largest_scc_fraction=largest / net.n_nodes,
        scc_id=scc_id,
        clustering_coefficient=clustering_coefficient(net),
    )


def clustering_coefficient(net: RecNetwork) -> float:
    """Mean over nodes of the fraction of realized directed edges among each
    node's out-neighbors; nodes with fewer than two out-neighbors contribute 0.
    """
    adj = net.adjacency()
    neighbor_sets = [set(targets) for targets in adj]
    total = 0.0
    for targets in adj:
        k = len(targets)
        if k < 2:
            continue
        members = set(targets)
        realized = 0
        for j in targets:
            realized += sum(1 for w in neighbor_sets[j] if w != j and w in members)
        total += realized / (k * (k - 1))
    return total / net.n_nodes if net.n_nodes else 0.0


def _bfs_levels(adj: list[list[int]], source: int, allowed: set[int] | None = None) -> dict[int, int]:
    levels = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in levels:
                continue
            if allowed is not None and w not in allowed:
                continue
            levels[w] = levels[v] + 1
            queue.append(w)
    return levels


def eccentricities(net: RecNetwork) -> EccentricityReport:
    """Per-node longest shortest path inside the largest SCC.

    Paths never leave the SCC (leaving and re-entering would contradict SCC
    maximality), so restricting BFS to SCC members is exact.
    """
    report = strongly_connected_components(net)
    members = report.largest_members()
    if len(members) < 2:
        raise ParameterError("no meaningful eccentricity: largest SCC has fewer than 2 nodes")
    member_set = set(members)
    adj = net.adjacency()
    values: dict[int, int] = {}
    for source in members:
        levels = _bfs_levels(adj, source, allowed=member_set)
        values[source] = max(levels.values())
    return EccentricityReport(values=values, diameter=max(values.values()))


def _closure(adj: list[list[int]], frontier: set[int], blocked: set[int]) -> set[int]:
    """Nodes reachable from ``frontier`` without stepping into ``blocked``."""
    visited = set(frontier)
    queue = deque(frontier)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in visited and w not in blocked:
                visited.add(w)
                queue.append(w)
    return visited


def _reverse_adjacency(adj: list[list[int]]) -> list[list[int]]:
    rev: list[list[int]] = [[] for _ in adj]
    for v, targets in enumerate(adj):
        for w in targets:
            rev[w].append(v)
    return rev


def bowtie(net: RecNetwork, components: ComponentReport | None = None) -> BowTie:
    """Partition nodes by reachability relative to the largest SCC.

    A node both reachable from IN and reaching OUT is TUBE; the tendril
    labels apply only after the TUBE check.
    """
    report = components or strongly_connected_components(net)
    core = set(report.largest_members())
    adj = net.adjacency()
    rev = _reverse_adjacency(adj)

    forward = _closure(adj, core, blocked=set())
    backward = _closure(rev, core, blocked=set())
    out_part = forward - core
    in_part = backward - core

    from_in = _closure(adj, in_part, blocked=core | out_part) - in_part if in_part else set()
    to_out = _closure(rev, out_part, blocked=core | in_part) - out_part if out_part else set()

    labels = []
    for node in range(net.n_nodes):
        if node in core:
            labels.append("SCC")
        elif node in in_part:
            labels.append("IN")
        elif node in out_part:
            labels.append("OUT")
        elif node in from_in and node in to_out:
            labels.append("TUBE")
        elif node in from_in:
            labels.append("TL_IN")
        elif node in to_out:
            labels.append("TL_OUT")
        else:
            labels.append("OTHER")
    sizes = {name: 0 for name in BOWTIE_LABELS}
    for name in labels:
        sizes[name] += 1
    return BowTie(label=labels, sizes=sizes)


def membership_change(nets: list[RecNetwork]) -> list[np.ndarray]:
    """7x7 transition counts between consecutive networks' bow-tie labels.

    Matrices are indexed by :data:`BOWTIE_LABELS` order; row sums equal the
    earlier network's label sizes.
    """
    if len(nets) < 2:
        raise ParameterError("need at least two networks to compare")
    node_counts = {net.n_nodes for net in nets}
    if len(node_counts) != 1:
        raise ParameterError(f"networks have mismatched node sets: {sorted(node_counts)}")
    index = {name: k for k, name in enumerate(BOWTIE_LABELS)}
    ties = [bowtie(net) for net in nets]
    matrices = []
    for earlier, later in zip(ties, ties[1:]):
        matrix = np.zeros((len(BOWTIE_LABELS), len(BOWTIE_LABELS)), dtype=np.int64)
        for a, b in zip(earlier.label, later.label):
            matrix[index[a], index[b]] += 1
        matrices.append(matrix)
    return matrices


def topology_report(net: RecNetwork) -> dict:
    """Assemble the per-network JSON report payload."""
    components = strongly_connected_components(net)
    tie = bowtie(net, components)
    try:
        ecc = eccentricities(net)
        diameter: int | None = ecc.diameter
        histogram = {str(k): v for k, v in ecc.histogram().items()}
    except ParameterError:
        diameter = None
        histogram = {}
    return {
        "n_nodes": net.n_nodes,
        "N": net.N,
        "algo": net.provenance.algo,
        "diversifier": net.provenance.diversifier,
        "num_scc": components.num_scc,
        "largest_scc_fraction": components.largest_scc_fraction,
        "clustering": components.clustering_coefficient,
        "bowtie_sizes": tie.sizes,
        "diameter": diameter,
        "eccentricity_histogram": histogram,
    }
