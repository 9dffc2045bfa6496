"""Community detection on the flattened alignment graph.

Three interchangeable back-ends over one weighted undirected graph type:

* ``louvain``           two-phase greedy modularity maximization
* ``greedy_cnm``        agglomerative modularity merging
* ``infomap_two_level`` two-level map-equation (codelength) minimization

All three are deterministic given (graph, seed): node visit order is a
seeded permutation where applicable, and ties are broken by the lowest
community id.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

from .errors import EmptyGraph, ParseError, ValidationError

_TOL = 1e-7  # per-pass objective tolerance; below reporting precision
_MOVE_EPS = 1e-12  # strict-improvement guard for codelength moves

COMMUNITIES_HEADER = "#mulan-communities v1"


class WeightedFlatGraph:
    """Weighted undirected graph with a fixed canonical node order."""

    def __init__(self, nodes: Sequence[Hashable], edges: Iterable[tuple]):
        self.nodes: tuple = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValidationError("duplicate node ids in graph")
        self.index: dict = {x: i for i, x in enumerate(self.nodes)}
        n = len(self.nodes)
        self.adj: list[dict[int, float]] = [{} for _ in range(n)]
        self.total_weight = 0.0
        for u, v, w in edges:
            if u == v:
                raise ValidationError(f"self-loop on {u!r}")
            if w <= 0:
                raise ValidationError(f"edge weight must be positive, got {w}")
            i, j = self.index[u], self.index[v]
            if j in self.adj[i]:
                raise ValidationError(f"duplicate edge ({u!r}, {v!r})")
            self.adj[i][j] = w
            self.adj[j][i] = w
            self.total_weight += w
        self.degree: list[float] = [sum(nbrs.values()) for nbrs in self.adj]
        self.two_m = 2.0 * self.total_weight

    @classmethod
    def from_mag(cls, mag) -> "WeightedFlatGraph":
        """Forget layers and edge kinds, keep nodes and weights."""
        return cls(mag.nodes, [(e.u, e.v, e.weight) for e in mag.edges])

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj) // 2


@dataclass
class Partition:
    """Hard assignment of graph nodes to contiguous community ids."""

    assignment: dict
    n_communities: int
    quality: float
    algorithm: str
    rng_seed: Optional[int] = None

    def communities(self) -> list[list]:
        groups: list[list] = [[] for _ in range(self.n_communities)]
        for node, cid in self.assignment.items():
            groups[cid].append(node)
        return groups

    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities()]


def _canonical_membership(graph: WeightedFlatGraph, membership: list[int]) -> tuple[dict, int]:
    """Renumber community labels to 0..C-1 by first appearance in node order."""
    relabel: dict[int, int] = {}
    assignment = {}
    for i, node in enumerate(graph.nodes):
        c = membership[i]
        if c not in relabel:
            relabel[c] = len(relabel)
        assignment[node] = relabel[c]
    return assignment, len(relabel)


def modularity(graph: WeightedFlatGraph, partition: Partition | dict) -> float:
    """Newman weighted modularity of a partition, from scratch."""
    if graph.two_m == 0:
        raise EmptyGraph("modularity needs a graph with positive total weight")
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    missing = [x for x in graph.nodes if x not in assignment]
    if missing:
        raise ValidationError(f"partition does not cover {len(missing)} nodes")
    sum_in: dict[int, float] = {}
    sum_tot: dict[int, float] = {}
    for i, node in enumerate(graph.nodes):
        c = assignment[node]
        sum_tot[c] = sum_tot.get(c, 0.0) + graph.degree[i]
        sum_in.setdefault(c, 0.0)
    for i, node in enumerate(graph.nodes):
        ci = assignment[node]
        for j, w in graph.adj[i].items():
            if j > i and assignment[graph.nodes[j]] == ci:
                sum_in[ci] += 2.0 * w
    two_m = graph.two_m
    return sum(sum_in[c] / two_m - (sum_tot[c] / two_m) ** 2 for c in sum_tot)


# ---------------------------------------------------------------------------
# Internal level graph shared by the Louvain-style optimizers. Self-loops
# produced by aggregation are stored with doubled weight so that degrees and
# community totals stay consistent with the flat-graph conventions.


class _Level:
    def __init__(self, adj: list[dict[int, float]], two_m: float):
        self.adj = adj
        self.n = len(adj)
        self.k = [sum(nbrs.values()) for nbrs in adj]
        self.two_m = two_m

    @classmethod
    def from_flat(cls, graph: WeightedFlatGraph) -> "_Level":
        return cls([dict(nbrs) for nbrs in graph.adj], graph.two_m)

    def self_loop(self, i: int) -> float:
        return self.adj[i].get(i, 0.0)


def _aggregate(level: _Level, membership: list[int], n_comms: int) -> _Level:
    adj: list[dict[int, float]] = [{} for _ in range(n_comms)]
    for i in range(level.n):
        ci = membership[i]
        for j, w in level.adj[i].items():
            if j < i:
                continue
            cj = membership[j]
            if i == j:
                adj[ci][ci] = adj[ci].get(ci, 0.0) + w  # already doubled
            elif ci == cj:
                adj[ci][ci] = adj[ci].get(ci, 0.0) + 2.0 * w
            else:
                adj[ci][cj] = adj[ci].get(cj, 0.0) + w
                adj[cj][ci] = adj[cj].get(ci, 0.0) + w
    return _Level(adj, level.two_m)


def _renumber(membership: list[int]) -> tuple[list[int], int]:
    relabel: dict[int, int] = {}
    out = []
    for c in membership:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    return out, len(relabel)


def _level_modularity(level: _Level, membership: list[int]) -> float:
    sum_in: dict[int, float] = {}
    sum_tot: dict[int, float] = {}
    for i in range(level.n):
        c = membership[i]
        sum_tot[c] = sum_tot.get(c, 0.0) + level.k[i]
        sum_in.setdefault(c, 0.0)
        for j, w in level.adj[i].items():
            if j == i:
                sum_in[c] += w
            elif j > i and membership[j] == c:
                sum_in[c] += 2.0 * w
    two_m = level.two_m
    return sum(sum_in[c] / two_m - (sum_tot[c] / two_m) ** 2 for c in sum_tot)


def _louvain_sweeps(level: _Level, order: list[int], verify: bool) -> list[int]:
    """Repeated local modularity moves until a full sweep changes nothing.

    A node only moves on a strictly positive gain; among equally good
    targets the lowest community id wins.
    """
    membership = list(range(level.n))
    sum_tot = list(level.k)
    m = level.two_m / 2.0
    q_gain = 0.0
    if verify:
        q_start = _level_modularity(level, membership)
    moved = True
    while moved:
        moved = False
        for i in order:
            ci = membership[i]
            links: dict[int, float] = {}
            for j, w in level.adj[i].items():
                if j != i:
                    c = membership[j]
                    links[c] = links.get(c, 0.0) + w
            sum_tot[ci] -= level.k[i]
            scale = level.k[i] / level.two_m
            gain_stay = links.get(ci, 0.0) - sum_tot[ci] * scale
            best_c, best_gain = ci, gain_stay
            for c in sorted(links):
                if c == ci:
                    continue
                gain = links[c] - sum_tot[c] * scale
                if gain > best_gain:
                    best_gain = gain
                    best_c = c
            sum_tot[best_c] += level.k[i]
            if best_c != ci:
                membership[i] = best_c
                q_gain += (best_gain - gain_stay) / m
                moved = True
        if verify:
            q_now = _level_modularity(level, membership)
            if abs((q_start + q_gain) - q_now) > 1e-9:
                raise AssertionError(
                    f"incremental modularity drifted: {q_start + q_gain} vs {q_now}"
                )
            if q_gain < -1e-12:
                raise AssertionError("modularity decreased during local moves")
    return membership


def louvain(graph: WeightedFlatGraph, seed: int = 0, _verify: bool = False) -> Partition:
    """Two-phase Louvain: seeded-order local moves, then aggregation,
    repeated while modularity improves by at least the pass tolerance."""
    if graph.n_nodes == 0 or graph.two_m == 0:
        raise EmptyGraph("louvain needs a non-empty weighted graph")
    rng = random.Random(seed)
    level = _Level.from_flat(graph)
    mappings: list[list[int]] = []
    q_current = _level_modularity(level, list(range(level.n)))
    while True:
        order = list(range(level.n))
        rng.shuffle(order)
        membership = _louvain_sweeps(level, order, _verify)
        membership, n_comms = _renumber(membership)
        q_new = _level_modularity(level, membership)
        if q_new - q_current < _TOL or n_comms == level.n:
            break
        mappings.append(membership)
        q_current = q_new
        level = _aggregate(level, membership, n_comms)

    flat_membership = list(range(graph.n_nodes))
    for mapping in mappings:
        flat_membership = [mapping[c] for c in flat_membership]
    assignment, n_comms = _canonical_membership(graph, flat_membership)
    quality = modularity(graph, assignment)
    return Partition(assignment, n_comms, quality, "louvain", seed)


def greedy_cnm(graph: WeightedFlatGraph) -> Partition:
    """Agglomerative modularity maximization: repeatedly merge the pair of
    communities with the largest positive gain; ties go to the
    lexicographically smallest id pair. Deterministic, no RNG."""
    if graph.n_nodes == 0 or graph.two_m == 0:
        raise EmptyGraph("greedy merging needs a non-empty weighted graph")
    n = graph.n_nodes
    two_m = graph.two_m
    m = graph.total_weight
    sum_tot = list(graph.degree)
    between: list[dict[int, float]] = [dict(nbrs) for nbrs in graph.adj]
    alive = [True] * n
    members: list[list[int]] = [[i] for i in range(n)]

    def gain(a: int, b: int) -> float:
        return between[a][b] / m - 2.0 * (sum_tot[a] / two_m) * (sum_tot[b] / two_m)

    version: dict[tuple[int, int], int] = {}
    heap: list[tuple[float, int, int, int]] = []

    def push(a: int, b: int) -> None:
        if a > b:
            a, b = b, a
        version[(a, b)] = version.get((a, b), 0) + 1
        heapq.heappush(heap, (-gain(a, b), a, b, version[(a, b)]))

    for i in range(n):
        for j in graph.adj[i]:
            if i < j:
                push(i, j)

    while heap:
        neg_dq, a, b, ver = heapq.heappop(heap)
        if not (alive[a] and alive[b]) or version.get((a, b)) != ver:
            continue
        if -neg_dq <= 0:
            break
        # Merge b into a; the joint community keeps the smaller id.
        alive[b] = False
        members[a].extend(members[b])
        members[b] = []
        sum_tot[a] += sum_tot[b]
        for x, w in between[b].items():
            del between[x][b]
            if x == a:
                continue
            between[a][x] = between[a].get(x, 0.0) + w
            between[x][a] = between[a][x]
        between[b] = {}
        for x in between[a]:
            push(a, x)

    membership = [0] * n
    for c in range(n):
        for i in members[c]:
            membership[i] = c
    assignment, n_comms = _canonical_membership(graph, membership)
    quality = modularity(graph, assignment)
    return Partition(assignment, n_comms, quality, "greedy", None)


# ---------------------------------------------------------------------------
# Two-level map equation.


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def map_equation_codelength(graph: WeightedFlatGraph, partition: Partition | dict) -> float:
    """Two-level description length (bits) of a random walk under the
    partition; stationary visit rates come from the weighted degrees."""
    if graph.two_m == 0:
        raise EmptyGraph("codelength needs a graph with positive total weight")
    assignment = partition.assignment if isinstance(partition, Partition) else partition
    flow = [graph.degree[i] / graph.two_m for i in range(graph.n_nodes)]
    s: dict[int, float] = {}
    cut: dict[int, float] = {}
    for i, node in enumerate(graph.nodes):
        c = assignment[node]
        s[c] = s.get(c, 0.0) + flow[i]
        cut.setdefault(c, 0.0)
        for j, w in graph.adj[i].items():
            if assignment[graph.nodes[j]] != c:
                cut[c] += w
    q = {c: cut[c] / graph.two_m for c in cut}
    q_tot = sum(q.values())
    codelength = _plogp(q_tot)
    for c in q:
        codelength += -2.0 * _plogp(q[c]) + _plogp(q[c] + s[c])
    codelength -= sum(_plogp(p) for p in flow)
    return codelength


def _map_sweeps(level: _Level, p: list[float], order: list[int]) -> list[int]:
    """Local codelength-descent moves until a full sweep changes nothing.

    Candidate targets are the neighbouring modules plus one empty module
    (so weakly attached nodes can split off again); a node only moves on a
    strict codelength decrease, ties to the lowest module id.
    """
    n = level.n
    membership = list(range(n))
    s = list(p)
    cut = [level.k[i] - level.self_loop(i) for i in range(n)]
    size = [1] * n
    free_heap: list[int] = []
    two_m = level.two_m
    q_tot = sum(cut) / two_m

    def term(qc: float, sc: float) -> float:
        return -2.0 * _plogp(qc) + _plogp(qc + sc)

    moved = True
    while moved:
        moved = False
        for i in order:
            ci = membership[i]
            links: dict[int, float] = {}
            for j, w in level.adj[i].items():
                if j != i:
                    c = membership[j]
                    links[c] = links.get(c, 0.0) + w
            ext = level.k[i] - level.self_loop(i)
            w_old = links.get(ci, 0.0)
            cut_ci_out = cut[ci] - ext + 2.0 * w_old
            s_ci_out = s[ci] - p[i]
            q_ci = cut[ci] / two_m
            q_ci_out = cut_ci_out / two_m
            base_old = term(q_ci, s[ci])

            empty_id = None
            if size[ci] > 1:
                while free_heap and size[free_heap[0]] > 0:
                    heapq.heappop(free_heap)
                if free_heap:
                    empty_id = free_heap[0]

            candidates = sorted(c for c in links if c != ci)
            if empty_id is not None:
                candidates = sorted(candidates + [empty_id])
            best_c, best_delta = ci, 0.0
            for c in candidates:
                w_ic = links.get(c, 0.0)
                cut_c = cut[c]
                s_c = s[c]
                cut_c_in = cut_c + ext - 2.0 * w_ic
                q_c = cut_c / two_m
                q_c_in = cut_c_in / two_m
                q_tot_new = q_tot + (q_ci_out - q_ci) + (q_c_in - q_c)
                delta = (
                    _plogp(q_tot_new)
                    - _plogp(q_tot)
                    + term(q_ci_out, s_ci_out)
                    - base_old
                    + term(q_c_in, s_c + p[i])
                    - term(q_c, s_c)
                )
                if delta < best_delta - _MOVE_EPS:
                    best_delta = delta
                    best_c = c
            if best_c != ci:
                cut_best_in = cut[best_c] + ext - 2.0 * links.get(best_c, 0.0)
                q_tot += (cut_ci_out - cut[ci]) / two_m + (cut_best_in - cut[best_c]) / two_m
                membership[i] = best_c
                size[ci] -= 1
                size[best_c] += 1
                s[best_c] += p[i]
                cut[best_c] = cut_best_in
                if size[ci] == 0:
                    s[ci] = 0.0
                    cut[ci] = 0.0
                    heapq.heappush(free_heap, ci)
                else:
                    s[ci] = s_ci_out
                    cut[ci] = cut_ci_out
                moved = True
        # Flush float drift accumulated by the incremental updates.
        q_tot = sum(cut) / two_m
    return membership


def infomap_two_level(graph: WeightedFlatGraph, seed: int = 0) -> Partition:
    """Minimize the two-level map equation with seeded local moves plus
    aggregation rounds; quality is the negated codelength so that larger is
    better across all detectors. Isolated nodes stay singleton modules."""
    if graph.n_nodes == 0 or graph.two_m == 0:
        raise EmptyGraph("map-equation detection needs a non-empty weighted graph")
    rng = random.Random(seed)
    level = _Level.from_flat(graph)
    p = [level.k[i] / level.two_m for i in range(level.n)]

    mappings: list[list[int]] = []
    l_current = map_equation_codelength(
        graph, {node: i for i, node in enumerate(graph.nodes)}
    )
    while True:
        order = list(range(level.n))
        rng.shuffle(order)
        membership = _map_sweeps(level, p, order)
        membership, n_comms = _renumber(membership)
        flat = list(range(graph.n_nodes))
        for mapping in mappings:
            flat = [mapping[c] for c in flat]
        flat = [membership[c] for c in flat]
        l_new = map_equation_codelength(
            graph, {node: flat[i] for i, node in enumerate(graph.nodes)}
        )
        if l_current - l_new < _TOL or n_comms == level.n:
            break
        mappings.append(membership)
        l_current = l_new
        level = _aggregate(level, membership, n_comms)
        p = [level.k[i] / level.two_m for i in range(level.n)]

    flat_membership = list(range(graph.n_nodes))
    for mapping in mappings:
        flat_membership = [mapping[c] for c in flat_membership]
    assignment, n_comms = _canonical_membership(graph, flat_membership)
    quality = -map_equation_codelength(graph, assignment)
    return Partition(assignment, n_comms, quality, "infomap", seed)


DETECTORS = ("louvain", "greedy", "infomap")


def detect(graph: WeightedFlatGraph, algorithm: str, seed: int = 0) -> Partition:
    if algorithm == "louvain":
        return louvain(graph, seed)
    if algorithm == "greedy":
        return greedy_cnm(graph)
    if algorithm == "infomap":
        return infomap_two_level(graph, seed)
    raise ValidationError(f"unknown detector {algorithm!r}; choose from {DETECTORS}")


def save_communities(partition: Partition, path) -> None:
    """Write one row per MAG node: community id, layer, and the pair."""
    rows = []
    for node, cid in partition.assignment.items():
        rows.append((cid, node.layer, node.a, node.b))
    rows.sort()
    out = [COMMUNITIES_HEADER]
    for cid, layer, a, b in rows:
        out.append(f"{cid}\t{layer}\t{a}|{b}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def load_communities(path) -> list[tuple[int, int, str, str]]:
    """Read (community, layer, a, b) rows from a communities file."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != COMMUNITIES_HEADER:
        raise ParseError(path, 1, f"missing header {COMMUNITIES_HEADER!r}")
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(path, line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        cid_s, layer_s, pair = fields
        try:
            cid = int(cid_s)
            layer = int(layer_s)
        except ValueError:
            raise ParseError(path, line_no, "community and layer must be integers") from None
        parts = pair.split("|")
        if len(parts) != 2:
            raise ParseError(path, line_no, f"pair column must be '<a>|<b>', got {pair!r}")
        rows.append((cid, layer, parts[0], parts[1]))
    return rows
