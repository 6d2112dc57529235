"""Greedy navigation simulation with background-knowledge oracles.

The simulated searcher only sees the out-links of its current node. At each
step it moves to the unvisited neighbor with the highest knowledge score for
the current goal, breaking ties uniformly at random from a seeded stream (so
the all-zero knowledge matrix degenerates to a uniform random walk), or
backtracks one node on the path stack at a dead end. Both actions cost one
step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .corpus import ItemCatalog
from .errors import MissingInputError, ParameterError
from .netbuild import RecNetwork
from .seeds import substream
from .similarity import normalize_rows, title_features

KNOWLEDGE_KINDS = ("title", "neighbors", "wiki_neighbors", "optimal", "random")

DEFAULT_BUDGET = 50
CLUSTER_SIZE_RANGE = (3, 30)


# --- background knowledge ---------------------------------------------------


class KnowledgeMatrix:
    """Item-pair score oracle guiding greedy navigation."""

    kind: str = "abstract"

    def pair_score(self, i: int, j: int) -> float:
        raise NotImplementedError

    def scores(self, candidates: list[int], target: int) -> np.ndarray:
        raise NotImplementedError

    def centroid_scores(self, candidates: list[int], targets: list[int]) -> np.ndarray:
        raise NotImplementedError


class CosineKnowledge(KnowledgeMatrix):
    """Dense cosine-similarity matrix over some item feature rows."""

    def __init__(self, kind: str, rows: sparse.csr_matrix):
        self.kind = kind
        normalized = normalize_rows(rows).tocsr()
        self.matrix = (normalized @ normalized.T).toarray()

    def pair_score(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    def scores(self, candidates: list[int], target: int) -> np.ndarray:
        return self.matrix[candidates, target]

    def centroid_scores(self, candidates: list[int], targets: list[int]) -> np.ndarray:
        return self.matrix[np.ix_(candidates, targets)].mean(axis=1)


class OptimalKnowledge(KnowledgeMatrix):
    """Scores are negated shortest-path hop counts; unreachable pairs score -inf."""

    kind = "optimal"

    def __init__(self, net: RecNetwork):
        self.n_nodes = net.n_nodes
        self._reverse: list[list[int]] = [[] for _ in range(net.n_nodes)]
        for v, edges in enumerate(net.out_edges):
            for w, _ in edges:
                self._reverse[w].append(v)
        self._dist_cache: dict[int, np.ndarray] = {}

    def _distances_to(self, target: int) -> np.ndarray:
        cached = self._dist_cache.get(target)
        if cached is not None:
            return cached
        dist = np.full(self.n_nodes, np.inf)
        dist[target] = 0.0
        queue = [target]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for w in self._reverse[v]:
                if dist[w] == np.inf:
                    dist[w] = dist[v] + 1.0
                    queue.append(w)
        self._dist_cache[target] = dist
        return dist

    def pair_score(self, i: int, j: int) -> float:
        return float(-self._distances_to(j)[i])

    def scores(self, candidates: list[int], target: int) -> np.ndarray:
        return -self._distances_to(target)[candidates]

    def centroid_scores(self, candidates: list[int], targets: list[int]) -> np.ndarray:
        stacked = np.stack([self._distances_to(t)[candidates] for t in targets])
        return -stacked.mean(axis=0)


class RandomKnowledge(KnowledgeMatrix):
    """All-zero scores: greedy selection degenerates to a uniform random walk."""

    kind = "random"

    def __init__(self, n_nodes: int):
        self.n_nodes = n_nodes

    def pair_score(self, i: int, j: int) -> float:
        return 0.0

    def scores(self, candidates: list[int], target: int) -> np.ndarray:
        return np.zeros(len(candidates))

    def centroid_scores(self, candidates: list[int], targets: list[int]) -> np.ndarray:
        return np.zeros(len(candidates))


def adjacency_indicator(adjacency: list[list[int]], n_nodes: int) -> sparse.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    for targets in adjacency:
        indices.extend(sorted(set(targets)))
        indptr.append(len(indices))
    data = np.ones(len(indices))
    return sparse.csr_matrix(
        (data, np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(n_nodes, n_nodes),
    )


def build_knowledge(
    kind: str,
    net: RecNetwork,
    catalog: ItemCatalog | None = None,
    wiki_edges: list[tuple[int, int]] | None = None,
) -> KnowledgeMatrix:
    """Construct the requested knowledge oracle for a network."""
    if kind == "title":
        if catalog is None:
            raise MissingInputError("title knowledge requires the item catalog")
        return CosineKnowledge("title", title_features(catalog).rows)
    if kind == "neighbors":
        return CosineKnowledge("neighbors", adjacency_indicator(net.adjacency(), net.n_nodes))
    if kind == "wiki_neighbors":
        if wiki_edges is None:
            raise MissingInputError("wiki_neighbors knowledge requires an external edge list")
        external: list[list[int]] = [[] for _ in range(net.n_nodes)]
        for src, dst in wiki_edges:
            if not (0 <= src < net.n_nodes and 0 <= dst < net.n_nodes):
                raise ParameterError(f"external edge ({src}, {dst}) outside the item id range")
            external[src].append(dst)
        return CosineKnowledge("wiki_neighbors", adjacency_indicator(external, net.n_nodes))
    if kind == "optimal":
        return OptimalKnowledge(net)
    if kind == "random":
        return RandomKnowledge(net.n_nodes)
    raise ParameterError(f"unknown knowledge kind {kind!r} (expected one of {KNOWLEDGE_KINDS})")


# --- goal scorers ------------------------------------------------------------


class SingleGoal:
    """Reach one fixed target node."""

    def __init__(self, knowledge: KnowledgeMatrix, target: int):
        self.knowledge = knowledge
        self.target = target
        self.total_goals = 1
        self._found = False

    def score(self, candidates: list[int]) -> np.ndarray:
        return self.knowledge.scores(candidates, self.target)

    def visit(self, node: int) -> list[int]:
        if not self._found and node == self.target:
            self._found = True
            return [node]
        return []

    def done(self) -> bool:
        return self._found


class ClusterGoal:
    """Reach any node of a cluster, steering by the full-cluster centroid."""

    def __init__(self, knowledge: KnowledgeMatrix, cluster: list[int]):
        if not cluster:
            raise ParameterError("cluster goal requires a non-empty cluster")
        self.knowledge = knowledge
        self.cluster = sorted(cluster)
        self.members = set(cluster)
        self.total_goals = 1
        self._found = False

    def score(self, candidates: list[int]) -> np.ndarray:
        return self.knowledge.centroid_scores(candidates, self.cluster)

    def visit(self, node: int) -> list[int]:
        if not self._found and node in self.members:
            self._found = True
            return [node]
        return []

    def done(self) -> bool:
        return self._found


class PatchGoal:
    """Visit every node of a patch; the centroid tracks the unfound members."""

    def __init__(self, knowledge: KnowledgeMatrix, members: list[int]):
        if not members:
            raise ParameterError("patch goal requires a non-empty member set")
        self.knowledge = knowledge
        self.unfound = set(members)
        self.total_goals = len(members)

    def score(self, candidates: list[int]) -> np.ndarray:
        return self.knowledge.centroid_scores(candidates, sorted(self.unfound))

    def visit(self, node: int) -> list[int]:
        if node in self.unfound:
            self.unfound.discard(node)
            return [node]
        return []

    def done(self) -> bool:
        return not self.unfound


def goal_scorer_single(knowledge: KnowledgeMatrix, target: int) -> SingleGoal:
    return SingleGoal(knowledge, target)


def goal_scorer_centroid(knowledge: KnowledgeMatrix, cluster: list[int]) -> ClusterGoal:
    return ClusterGoal(knowledge, cluster)


# --- walk engine --------------------------------------------------------------


@dataclass
class WalkTrace:
    """One simulated navigation episode."""

    steps: list[tuple[int, str, int]]
    targets_found: list[tuple[int, int]]
    success_fraction: float
    steps_used: int

    @property
    def succeeded(self) -> bool:
        return self.success_fraction >= 1.0

    @property
    def advance_count(self) -> int:
        return sum(1 for _, action, _ in self.steps if action == "advance")

    def last_node(self, start: int) -> int:
        return self.steps[-1][2] if self.steps else start


def greedy_walk(
    net: RecNetwork,
    scorer,
    start: int,
    budget: int,
    rng: np.random.Generator | int,
) -> WalkTrace:
    """Run one greedy episode from ``start``.

    ``budget`` is the step allowance per goal: it refreshes whenever the
    scorer reports a newly found target, so multi-target episodes may use up
    to budget * total_goals steps. Advances and backtracks both cost a step.
    """
    if not 0 <= start < net.n_nodes:
        raise ParameterError(f"start node {start} outside the network")
    if budget < 1:
        raise ParameterError("budget must be at least 1")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    adjacency = net.adjacency()
    visited = {start}
    stack = [start]
    steps: list[tuple[int, str, int]] = []
    found: list[tuple[int, int]] = []
    step = 0
    remaining = budget
    for target in scorer.visit(start):
        found.append((target, 0))
    while not scorer.done() and remaining > 0:
        current = stack[-1]
        candidates = [v for v in adjacency[current] if v not in visited]
        if candidates:
            values = scorer.score(candidates)
            top = values.max()
            tied = [c for c, v in zip(candidates, values) if v == top]
            nxt = tied[0] if len(tied) == 1 else tied[int(rng.integers(len(tied)))]
            step += 1
            remaining -= 1
            visited.add(nxt)
            stack.append(nxt)
            steps.append((step, "advance", nxt))
            for target in scorer.visit(nxt):
                found.append((target, step))
                remaining = budget
        elif len(stack) > 1:
            stack.pop()
            step += 1
            remaining -= 1
            steps.append((step, "backtrack", stack[-1]))
        else:
            break
    return WalkTrace(
        steps=steps,
        targets_found=found,
        success_fraction=len(found) / scorer.total_goals,
        steps_used=step,
    )


# --- item clustering -----------------------------------------------------------


@dataclass
class ItemClustering:
    """Clusters of items sharing an exact (genre set, year) key."""

    clusters: dict[int, list[int]]
    keys: dict[int, tuple[tuple[str, ...], int]]

    def eligible_ids(self) -> list[int]:
        return sorted(self.clusters)


def cluster_items(catalog: ItemCatalog) -> ItemClustering:
    """Group items by (sorted genre set, year), keeping clusters of 3 to 30 nodes.

    Items with an unknown year are excluded.
    """
    lo, hi = CLUSTER_SIZE_RANGE
    groups: dict[tuple[tuple[str, ...], int], list[int]] = {}
    for item in catalog.items:
        if item.year is None:
            continue
        key = (tuple(sorted(item.genres)), item.year)
        groups.setdefault(key, []).append(item.item_id)
    eligible = {key: nodes for key, nodes in groups.items() if lo <= len(nodes) <= hi}
    if not eligible:
        raise ParameterError(f"no clusters with {lo} to {hi} nodes")
    clusters: dict[int, list[int]] = {}
    keys: dict[int, tuple[tuple[str, ...], int]] = {}
    for cluster_id, key in enumerate(sorted(eligible)):
        clusters[cluster_id] = sorted(eligible[key])
        keys[cluster_id] = key
    return ItemClustering(clusters=clusters, keys=keys)


# --- scenario sampling ----------------------------------------------------------


def sample_pairs(n_nodes: int, count: int, seed: int) -> list[tuple[int, int]]:
    """Seeded (start, target) node pairs, reachability-blind, start != target."""
    if n_nodes < 2:
        raise ParameterError("need at least two nodes to sample pairs")
    rng = substream(seed, "sample-pairs")
    pairs = []
    for _ in range(count):
        start = int(rng.integers(n_nodes))
        target = int(rng.integers(n_nodes - 1))
        if target >= start:
            target += 1
        pairs.append((start, target))
    return pairs


@dataclass(frozen=True)
class BerrySample:
    start: int
    clusters: tuple[int, int, int, int]


def sample_quadruples(clustering: ItemClustering, count: int, seed: int) -> list[BerrySample]:
    """Seeded 4-cluster subsets with a start node drawn from the first cluster."""
    ids = clustering.eligible_ids()
    if len(ids) < 4:
        raise ParameterError(f"need at least 4 eligible clusters, have {len(ids)}")
    rng = substream(seed, "sample-quadruples")
    samples = []
    for _ in range(count):
        picks = [ids[k] for k in rng.choice(len(ids), size=4, replace=False)]
        first = clustering.clusters[picks[0]]
        start = first[int(rng.integers(len(first)))]
        samples.append(BerrySample(start=start, clusters=tuple(picks)))
    return samples


@dataclass(frozen=True)
class PatchSample:
    start: int
    cluster: int


def sample_patches(clustering: ItemClustering, count: int, seed: int) -> list[PatchSample]:
    """Seeded (cluster, start node in cluster) draws for foraging."""
    ids = clustering.eligible_ids()
    rng = substream(seed, "sample-patches")
    samples = []
    for _ in range(count):
        cluster = ids[int(rng.integers(len(ids)))]
        members = clustering.clusters[cluster]
        start = members[int(rng.integers(len(members)))]
        samples.append(PatchSample(start=start, cluster=cluster))
    return samples


# --- scenario runners -------------------------------------------------------------


@dataclass
class RunRecord:
    sample_id: int
    goals_total: int
    goals_found: int
    steps_used: int
    success_fraction: float
    trace: WalkTrace | None = None


@dataclass
class ScenarioResult:
    scenario: str
    knowledge: str
    records: list[RunRecord]
    success_ratio: float = field(init=False)

    def __post_init__(self) -> None:
        if self.records:
            self.success_ratio = sum(r.success_fraction for r in self.records) / len(self.records)
        else:
            self.success_ratio = 0.0


def run_p2p(
    net: RecNetwork,
    knowledge: KnowledgeMatrix,
    pairs: list[tuple[int, int]],
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    keep_traces: bool = False,
) -> ScenarioResult:
    """Point-to-point search over pre-sampled (start, target) pairs."""
    records = []
    for sample_id, (start, target) in enumerate(pairs):
        scorer = SingleGoal(knowledge, target)
        trace = greedy_walk(net, scorer, start, budget, substream(seed, "walk-p2p", sample_id))
        records.append(
            RunRecord(
                sample_id=sample_id,
                goals_total=1,
                goals_found=len(trace.targets_found),
                steps_used=trace.steps_used,
                success_fraction=trace.success_fraction,
                trace=trace if keep_traces else None,
            )
        )
    return ScenarioResult(scenario="p2p", knowledge=knowledge.kind, records=records)


def run_berrypicking(
    net: RecNetwork,
    knowledge: KnowledgeMatrix,
    clustering: ItemClustering,
    samples: list[BerrySample],
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> ScenarioResult:
    """Sequential cluster goals: reach any node of clusters 2, 3, 4 in order.

    Each goal starts from the previous arrival node with a fresh budget and a
    cleared visited set; an unmet goal ends the episode.
    """
    records = []
    for sample_id, sample in enumerate(samples):
        position = sample.start
        goals_found = 0
        steps_total = 0
        for goal_index, cluster_id in enumerate(sample.clusters[1:]):
            scorer = ClusterGoal(knowledge, clustering.clusters[cluster_id])
            trace = greedy_walk(
                net,
                scorer,
                position,
                budget,
                substream(seed, "walk-berry", sample_id, goal_index),
            )
            steps_total += trace.steps_used
            if not trace.targets_found:
                break
            goals_found += 1
            position = trace.targets_found[0][0]
        records.append(
            RunRecord(
                sample_id=sample_id,
                goals_total=3,
                goals_found=goals_found,
                steps_used=steps_total,
                success_fraction=goals_found / 3.0,
            )
        )
    return ScenarioResult(scenario="berrypicking", knowledge=knowledge.kind, records=records)


def run_foraging(
    net: RecNetwork,
    knowledge: KnowledgeMatrix,
    clustering: ItemClustering,
    samples: list[PatchSample],
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> ScenarioResult:
    """Deplete one information patch: visit every other node of the cluster.

    One continuous walk per sample; the per-goal budget refreshes each time a
    new member is found and the visited set persists for the whole episode.
    """
    records = []
    for sample_id, sample in enumerate(samples):
        members = [m for m in clustering.clusters[sample.cluster] if m != sample.start]
        scorer = PatchGoal(knowledge, members)
        trace = greedy_walk(
            net, scorer, sample.start, budget, substream(seed, "walk-forage", sample_id)
        )
        records.append(
            RunRecord(
                sample_id=sample_id,
                goals_total=len(members),
                goals_found=len(trace.targets_found),
                steps_used=trace.steps_used,
                success_fraction=trace.success_fraction,
            )
        )
    return ScenarioResult(scenario="foraging", knowledge=knowledge.kind, records=records)
