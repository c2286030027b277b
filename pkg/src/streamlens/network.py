"""Conversation networks: construction, density, k-core, sampling,
eigenvector centrality, Louvain communities, and community summaries.

Graphs are directed and weighted at construction. Centrality and community
detection operate on the symmetrized weighted view (w(u,v)+w(v,u)): power
iteration needs an irreducible non-negative operator and modularity is an
undirected quantity.
"""
from __future__ import annotations

import csv
import random
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .ingest import TweetRecord

__all__ = [
    "GRAPH_KINDS",
    "ConversationGraph",
    "GraphStats",
    "CentralityResult",
    "CommunityPartition",
    "InfluencerRow",
    "CommunityCard",
    "build_graph",
    "directed_density",
    "graph_stats",
    "k_core",
    "sample_edges",
    "eigenvector_centrality",
    "top_influencers",
    "louvain",
    "modularity",
    "community_summary",
    "write_edge_csv",
    "read_edge_csv",
    "write_node_csv",
]

GRAPH_KINDS = ("mention", "retweet", "reply", "quote")


@dataclass
class ConversationGraph:
    """Directed weighted interaction graph of one kind."""

    kind: str
    nodes: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    directed: bool = True

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def add_edge(self, src: str, dst: str, weight: int = 1) -> None:
        if src == dst:
            return  # self-interactions carry no inter-account signal
        self.nodes.add(src)
        self.nodes.add(dst)
        self.edges[(src, dst)] = self.edges.get((src, dst), 0) + weight

    def weight_sum(self) -> int:
        return sum(self.edges.values())

    def symmetrized_adjacency(self) -> dict[str, dict[str, float]]:
        """Undirected weighted view: w(u,v) + w(v,u)."""
        adj: dict[str, dict[str, float]] = {u: {} for u in self.nodes}
        for (u, v), w in self.edges.items():
            adj[u][v] = adj[u].get(v, 0.0) + w
            adj[v][u] = adj[v].get(u, 0.0) + w
        return adj

    def degree_view(self) -> dict[str, int]:
        """Total (in+out) unweighted degree per node."""
        deg = dict.fromkeys(self.nodes, 0)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    density: float


@dataclass(frozen=True)
class CentralityResult:
    scores: dict[str, float]
    iterations_used: int
    converged: bool
    normalization: str = "euclidean"


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict[str, int]
    modularity: float
    community_sizes: dict[int, int]
    # Q re-evaluated on the input graph after each coarsening pass;
    # non-decreasing, and the last entry equals the final modularity.
    pass_modularities: tuple[float, ...] = ()


@dataclass(frozen=True)
class InfluencerRow:
    rank: int
    account_id: str
    screen_name: str
    centrality: float
    bot_score: float | None
    flagged: bool


@dataclass(frozen=True)
class CommunityCard:
    community_id: int
    size: int
    scored_members: int
    bot_share: float | None
    top_members: tuple[tuple[str, float], ...]  # (screen_name, centrality)
    top_hashtags: tuple[tuple[str, int], ...]


def build_graph(records: Iterable[TweetRecord], kind: str) -> ConversationGraph:
    """Accumulate author→referenced-account edges of one interaction kind.

    Parallel interactions add weight; self-loops are dropped. Retweets,
    replies, and quotes need the referenced author resolvable from the raw
    line (embedded object); records without it contribute no edge.
    """
    if kind not in GRAPH_KINDS:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    g = ConversationGraph(kind=kind)
    if kind == "mention":
        for r in records:
            for mentioned_id, _ in r.mentions:
                g.add_edge(r.author_id, mentioned_id)
    elif kind == "retweet":
        for r in records:
            if r.retweeted_id is not None and r.retweeted_author_id is not None:
                g.add_edge(r.author_id, r.retweeted_author_id)
    elif kind == "reply":
        for r in records:
            if r.reply_to_id is not None and r.reply_to_author_id is not None:
                g.add_edge(r.author_id, r.reply_to_author_id)
    else:  # quote
        for r in records:
            if r.quoted_id is not None and r.quoted_author_id is not None:
                g.add_edge(r.author_id, r.quoted_author_id)
    return g


def directed_density(n: int, m: int) -> float:
    """m / (n·(n−1)); zero for graphs too small to have a pair."""
    if n < 0 or m < 0:
        raise ValueError("counts must be non-negative")
    if n < 2:
        return 0.0
    possible = n * (n - 1)
    if m > possible:
        raise ValueError(f"m={m} exceeds maximum {possible} for n={n}")
    return m / possible


def graph_stats(g: ConversationGraph) -> GraphStats:
    return GraphStats(n=g.n, m=g.m, density=directed_density(g.n, g.m))


def k_core(g: ConversationGraph, k: int) -> ConversationGraph:
    """Maximal subgraph where every node keeps total degree ≥ k.

    Iterative peeling over in+out unweighted degree; the result may span
    several components. ``degree_mode`` is fixed to total degree here;
    see :func:`k_core_directed` for one-sided variants.
    """
    return k_core_directed(g, k, degree_mode="total")


def k_core_directed(g: ConversationGraph, k: int, degree_mode: str = "total") -> ConversationGraph:
    if k < 0:
        raise ValueError("k must be non-negative")
    if degree_mode not in ("total", "in", "out"):
        raise ValueError("degree_mode must be 'total', 'in', or 'out'")

    # affects[u] maps v -> how much v's degree drops when u is removed.
    degree = dict.fromkeys(g.nodes, 0)
    affects: dict[str, Counter] = {u: Counter() for u in g.nodes}
    for u, v in g.edges:
        if degree_mode == "total":
            degree[u] += 1
            degree[v] += 1
            affects[u][v] += 1
            affects[v][u] += 1
        elif degree_mode == "in":
            degree[v] += 1
            affects[u][v] += 1
        else:
            degree[u] += 1
            affects[v][u] += 1

    removed: set[str] = set()
    queue = [u for u, d in degree.items() if d < k]
    while queue:
        u = queue.pop()
        if u in removed:
            continue
        removed.add(u)
        for v, mult in affects[u].items():
            if v in removed:
                continue
            degree[v] -= mult
            if degree[v] < k:
                queue.append(v)

    survivors = g.nodes - removed
    core = ConversationGraph(kind=g.kind)
    core.nodes = set(survivors)
    core.edges = {
        (u, v): w for (u, v), w in g.edges.items() if u in survivors and v in survivors
    }
    return core


def sample_edges(g: ConversationGraph, m_target: int, seed: int) -> ConversationGraph:
    """Uniform edge sample without replacement, deterministic for a seed.

    Nodes are restricted to the sampled edges' endpoints; weights are kept.
    """
    if m_target > g.m:
        raise ValueError(f"m_target={m_target} exceeds edge count {g.m}")
    rng = random.Random(seed)
    chosen = rng.sample(sorted(g.edges), m_target)
    sampled = ConversationGraph(kind=g.kind)
    for u, v in chosen:
        sampled.nodes.add(u)
        sampled.nodes.add(v)
        sampled.edges[(u, v)] = g.edges[(u, v)]
    return sampled


def _symmetrized_matrix(g: ConversationGraph) -> tuple[sparse.csr_matrix, list[str]]:
    order = sorted(g.nodes)
    index = {u: i for i, u in enumerate(order)}
    n = len(order)
    rows, cols, vals = [], [], []
    for (u, v), w in g.edges.items():
        i, j = index[u], index[v]
        rows.append(i)
        cols.append(j)
        vals.append(float(w))
        rows.append(j)
        cols.append(i)
        vals.append(float(w))
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    mat.sum_duplicates()
    return mat, order


def eigenvector_centrality(
    g: ConversationGraph,
    tolerance: float = 1e-10,
    max_iterations: int = 1000,
) -> CentralityResult:
    """Power iteration for the principal eigenvector of the symmetrized graph.

    Iterates on A+I, which shares A's eigenvectors but keeps the dominant
    eigenvalue simple even on bipartite structures that would otherwise
    oscillate. Scores are unit-Euclidean-normalized and non-negative;
    convergence is successive-iterate infinity-norm delta < tolerance.
    """
    if g.n == 0:
        raise ValueError("cannot compute centrality on an empty graph")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    mat, order = _symmetrized_matrix(g)
    n = len(order)
    x = np.full(n, 1.0 / np.sqrt(n))
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        y = mat @ x + x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            break
        y /= norm
        if np.max(np.abs(y - x)) < tolerance:
            x = y
            converged = True
            break
        x = y
    scores = {u: float(max(x[i], 0.0)) for i, u in enumerate(order)}
    return CentralityResult(scores=scores, iterations_used=iterations, converged=converged)


def top_influencers(
    centrality: CentralityResult,
    bots: "Mapping[str, float] | None",
    top_n: int,
    threshold: float = 0.5,
    names: Mapping[str, str] | None = None,
) -> list[InfluencerRow]:
    """Descending-centrality ranking joined with bot scores.

    Ties break by account id ascending. Accounts without a score keep
    ``bot_score=None`` and are never flagged.
    """
    if top_n < 1:
        raise ValueError("top_n must be at least 1")
    ranked = sorted(centrality.scores.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    rows = []
    for rank, (account_id, score) in enumerate(ranked, start=1):
        bot_score = None if bots is None else bots.get(account_id)
        rows.append(
            InfluencerRow(
                rank=rank,
                account_id=account_id,
                screen_name=(names or {}).get(account_id, account_id),
                centrality=score,
                bot_score=bot_score,
                flagged=bot_score is not None and bot_score > threshold,
            )
        )
    return rows


def modularity(g: ConversationGraph, assignment: Mapping[str, int]) -> float:
    """Newman-Girvan Q of a partition on the symmetrized weighted graph."""
    missing = g.nodes - assignment.keys()
    if missing:
        raise ValueError(f"assignment missing {len(missing)} node(s)")
    adj = g.symmetrized_adjacency()
    two_m = sum(sum(nbrs.values()) for nbrs in adj.values())
    if two_m == 0.0:
        return 0.0
    intra = defaultdict(float)  # community -> 2 * internal weight
    degree = defaultdict(float)  # community -> total weighted degree
    for u, nbrs in adj.items():
        cu = assignment[u]
        degree[cu] += sum(nbrs.values())
        for v, w in nbrs.items():
            if assignment[v] == cu:
                intra[cu] += w
    q = 0.0
    for c in degree:
        q += intra[c] / two_m - (degree[c] / two_m) ** 2
    return q


def louvain(g: ConversationGraph, seed: int = 0) -> CommunityPartition:
    """Two-phase Louvain on the symmetrized weighted graph.

    Node visit order is seeded-shuffled once per pass, so a fixed seed gives
    a fixed partition. Per-pass modularity is non-decreasing by construction;
    the returned Q is recomputed from the final assignment on the input graph.
    Community ids are renumbered by size descending (ties by smallest member).
    """
    if g.m == 0:
        raise ValueError("community detection needs at least one edge")
    rng = random.Random(seed)

    # Work on an integer-indexed aggregate graph; membership maps each
    # original node to its current aggregate node.
    order = sorted(g.nodes)
    membership = {u: i for i, u in enumerate(order)}
    adj: list[dict[int, float]] = [dict() for _ in order]
    self_loops = [0.0] * len(order)
    for (u, v), w in g.edges.items():
        i, j = membership[u], membership[v]
        adj[i][j] = adj[i].get(j, 0.0) + w
        adj[j][i] = adj[j].get(i, 0.0) + w

    two_m = sum(sum(nbrs.values()) for nbrs in adj) + sum(self_loops)

    pass_q: list[float] = []
    while True:
        moved = _local_move_pass(adj, self_loops, two_m, rng)
        communities = sorted(set(moved))
        if len(communities) == len(adj):
            # Moves always grow some community, so no merge means no move:
            # the partition is stable and `moved` is the identity.
            break
        # Aggregate: communities become nodes; repeat on the smaller graph.
        # Internal weight (ordered pairs, plus absorbed loops) becomes the
        # aggregate self-loop so degrees and Q carry over unchanged.
        remap = {c: i for i, c in enumerate(communities)}
        new_adj: list[dict[int, float]] = [dict() for _ in communities]
        new_loops = [0.0] * len(communities)
        for i, nbrs in enumerate(adj):
            ci = remap[moved[i]]
            new_loops[ci] += self_loops[i]
            for j, w in nbrs.items():
                cj = remap[moved[j]]
                if ci == cj:
                    new_loops[ci] += w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
        for u in membership:
            membership[u] = remap[moved[membership[u]]]
        adj, self_loops = new_adj, new_loops
        pass_q.append(modularity(g, membership))

    # Renumber communities by size desc, ties by smallest member id.
    groups: dict[int, list[str]] = defaultdict(list)
    for u in order:
        groups[membership[u]].append(u)
    ranked = sorted(groups.values(), key=lambda members: (-len(members), members[0]))
    assignment = {u: cid for cid, members in enumerate(ranked) for u in members}
    sizes = {cid: len(members) for cid, members in enumerate(ranked)}
    final_q = modularity(g, assignment)
    if not pass_q:
        pass_q.append(final_q)
    return CommunityPartition(
        assignment=assignment,
        modularity=final_q,
        community_sizes=sizes,
        pass_modularities=tuple(pass_q),
    )


def _local_move_pass(
    adj: list[dict[int, float]],
    self_loops: list[float],
    two_m: float,
    rng: random.Random,
) -> list[int]:
    """Greedy modularity moves until a full sweep changes nothing."""
    n = len(adj)
    community = list(range(n))
    degree = [sum(nbrs.values()) + self_loops[i] for i, nbrs in enumerate(adj)]
    comm_degree = degree.copy()

    visit_order = list(range(n))
    rng.shuffle(visit_order)

    moved = True
    while moved:
        moved = False
        for i in visit_order:
            ci = community[i]
            comm_degree[ci] -= degree[i]
            # Weight from i to each neighboring community.
            links = defaultdict(float)
            links[ci] += 0.0
            for j, w in adj[i].items():
                if j != i:
                    links[community[j]] += w
            best_c, best_gain = ci, 0.0
            base = links[ci] - comm_degree[ci] * degree[i] / two_m
            # Ascending community order plus strict improvement keeps the
            # smallest community id on gain ties, so runs are reproducible.
            for c, w_ic in sorted(links.items()):
                if c == ci:
                    continue
                gain = (w_ic - comm_degree[c] * degree[i] / two_m) - base
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            community[i] = best_c
            comm_degree[best_c] += degree[i]
            if best_c != ci:
                moved = True
    return community


def community_summary(
    partition: CommunityPartition,
    centrality: CentralityResult,
    records: Sequence[TweetRecord],
    bots: Mapping[str, float] | None,
    top_n: int = 5,
    threshold: float = 0.5,
    max_communities: int = 10,
) -> list[CommunityCard]:
    """Cards for the largest communities: size, bot share, influencers, hashtags."""
    members: dict[int, list[str]] = defaultdict(list)
    for account, cid in partition.assignment.items():
        members[cid].append(account)
    biggest = sorted(members, key=lambda c: (-len(members[c]), c))[:max_communities]

    names: dict[str, str] = {}
    tags_by_author: dict[str, Counter] = defaultdict(Counter)
    for r in records:
        names.setdefault(r.author_id, r.screen_name)
        if r.hashtags:
            tags_by_author[r.author_id].update(r.hashtags)

    cards = []
    for cid in biggest:
        group = members[cid]
        scored = [] if bots is None else [bots[a] for a in group if a in bots]
        bot_share = None
        if scored:
            # Flagged means strictly above threshold, matching the ranking view.
            bot_share = sum(1 for s in scored if s > threshold) / len(scored)
        ranked = sorted(
            group, key=lambda a: (-centrality.scores.get(a, 0.0), a)
        )[:top_n]
        tags = Counter()
        for a in group:
            tags += tags_by_author.get(a, Counter())
        top_tags = sorted(tags.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
        cards.append(
            CommunityCard(
                community_id=cid,
                size=len(group),
                scored_members=len(scored),
                bot_share=bot_share,
                top_members=tuple(
                    (names.get(a, a), centrality.scores.get(a, 0.0)) for a in ranked
                ),
                top_hashtags=tuple(top_tags),
            )
        )
    return cards


def write_edge_csv(g: ConversationGraph, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        for (u, v), w in sorted(g.edges.items()):
            writer.writerow([u, v, w])


def read_edge_csv(path, kind: str = "mention") -> ConversationGraph:
    g = ConversationGraph(kind=kind)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "src":
                continue
            g.add_edge(row[0], row[1], int(row[2]) if len(row) > 2 else 1)
    return g


def write_node_csv(names: Mapping[str, str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["account_id", "screen_name"])
        for account_id in sorted(names):
            writer.writerow([account_id, names[account_id]])
