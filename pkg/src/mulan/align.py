"""Building of the multilayer alignment graph (MAG).

MAG nodes are seed pairs (one node from each input network, same layer).
Same-layer MAG-node pairs get a homogeneous match / mismatch / gap edge
depending on adjacency in one input and bounded distance in the other;
cross-layer pairs get a heterogeneous match / mismatch edge depending on
inter-edge agreement. Every edge carries the fixed weight of its kind.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    DuplicateSeed,
    LayerMismatch,
    ParseError,
    UnknownNode,
    ValidationError,
)
from .netgraph import MultilayerNetwork, bounded_distance, validate_label

SEEDS_HEADER = "#mulan-seeds v1"
MAG_HEADER = "#mulan-mag v1"


class EdgeKind(enum.Enum):
    HOM_MATCH = "hom_match"
    HOM_MISMATCH = "hom_mismatch"
    HOM_GAP = "hom_gap"
    HET_MATCH = "het_match"
    HET_MISMATCH = "het_mismatch"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AlignmentParams:
    """Gap-distance threshold and the five edge weights."""

    delta: int = 2
    w_match: float = 1.0
    w_mismatch: float = 0.5
    w_gap: float = 0.2
    w_hmatch: float = 0.9
    w_hmismatch: float = 0.4

    def __post_init__(self):
        if self.delta < 1:
            raise ValidationError(f"delta must be >= 1, got {self.delta}")
        weights = (self.w_match, self.w_mismatch, self.w_gap, self.w_hmatch, self.w_hmismatch)
        if any(w <= 0 for w in weights):
            raise ValidationError(f"all weights must be positive, got {weights}")
        if not self.w_match >= self.w_mismatch >= self.w_gap:
            raise ValidationError("need w_match >= w_mismatch >= w_gap")
        if not self.w_hmatch >= self.w_hmismatch:
            raise ValidationError("need w_hmatch >= w_hmismatch")

    def weight_for(self, kind: EdgeKind) -> float:
        return {
            EdgeKind.HOM_MATCH: self.w_match,
            EdgeKind.HOM_MISMATCH: self.w_mismatch,
            EdgeKind.HOM_GAP: self.w_gap,
            EdgeKind.HET_MATCH: self.w_hmatch,
            EdgeKind.HET_MISMATCH: self.w_hmismatch,
        }[kind]


@dataclass(frozen=True, order=True)
class MagNode:
    """An aligned node pair: a from the first network, b from the second."""

    layer: int
    a: str
    b: str


@dataclass(frozen=True, order=True)
class MagEdge:
    u: MagNode
    v: MagNode
    kind: EdgeKind = None  # type: ignore[assignment]
    weight: float = 0.0

    def __post_init__(self):
        if self.v < self.u:
            raise ValidationError("MagEdge endpoints must be in canonical order")


class SeedPairs:
    """Cross-network node correspondences with similarity scores, per layer.

    A node may appear in several pairs, but a repeated (layer, a, b)
    combination is rejected: it would map to the same alignment-graph node.
    """

    def __init__(self, rows: Iterable[tuple[int, str, str, float]]):
        by_layer: dict[int, list[tuple[str, str, float]]] = {}
        seen: set[tuple[int, str, str]] = set()
        for layer, a, b, sim in rows:
            if layer < 0:
                raise ValidationError(f"negative layer index {layer} in seed pair")
            validate_label(a)
            validate_label(b)
            if not 0.0 < sim <= 1.0:
                raise ValidationError(f"seed similarity must be in (0, 1], got {sim}")
            key = (layer, a, b)
            if key in seen:
                raise DuplicateSeed(f"duplicate seed pair {key}")
            seen.add(key)
            by_layer.setdefault(layer, []).append((a, b, sim))
        self.by_layer: dict[int, tuple[tuple[str, str, float], ...]] = {
            k: tuple(sorted(v)) for k, v in sorted(by_layer.items())
        }

    @classmethod
    def identity(cls, net_a: MultilayerNetwork, net_b: MultilayerNetwork) -> "SeedPairs":
        """Pair every node with its namesake, similarity 1. Requires equal
        label sets per layer."""
        if net_a.n_layers != net_b.n_layers:
            raise LayerMismatch(
                f"layer counts differ: {net_a.n_layers} vs {net_b.n_layers}"
            )
        rows = []
        for k in range(net_a.n_layers):
            if net_a.nodes[k] != net_b.nodes[k]:
                raise ValidationError(
                    f"identity seeds need equal node label sets in layer {k}"
                )
            rows.extend((k, x, x, 1.0) for x in sorted(net_a.nodes[k]))
        return cls(rows)

    @property
    def n_pairs(self) -> int:
        return sum(len(v) for v in self.by_layer.values())

    def rows(self) -> list[tuple[int, str, str, float]]:
        return [
            (layer, a, b, sim)
            for layer, pairs in self.by_layer.items()
            for a, b, sim in pairs
        ]


def load_seeds(path) -> SeedPairs:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != SEEDS_HEADER:
        raise ParseError(path, 1, f"missing header {SEEDS_HEADER!r}")
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ParseError(path, line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        layer_s, a, b, sim_s = fields
        try:
            layer = int(layer_s)
            sim = float(sim_s)
        except ValueError:
            raise ParseError(path, line_no, "layer must be int and similarity float") from None
        rows.append((layer, a, b, sim))
    return SeedPairs(rows)


def save_seeds(seeds: SeedPairs, path) -> None:
    out = [SEEDS_HEADER]
    for layer, a, b, sim in seeds.rows():
        out.append(f"{layer}\t{a}\t{b}\t{sim:g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


class MultilayerAlignmentGraph:
    """Weighted multilayer graph over aligned node pairs."""

    def __init__(
        self,
        n_layers: int,
        nodes: Iterable[MagNode],
        similarity: dict[MagNode, float],
        edges: Iterable[MagEdge],
        params: AlignmentParams,
        provenance: tuple[str, str] = ("G1", "G2"),
    ):
        self.n_layers = n_layers
        self.nodes: tuple[MagNode, ...] = tuple(sorted(nodes))
        self.similarity = dict(similarity)
        self.edges: tuple[MagEdge, ...] = tuple(sorted(edges))
        self.params = params
        self.provenance = provenance

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def kind_counts(self) -> dict[EdgeKind, int]:
        counts = {kind: 0 for kind in EdgeKind}
        for e in self.edges:
            counts[e.kind] += 1
        return counts

    def nodes_in_layer(self, layer: int) -> list[MagNode]:
        return [p for p in self.nodes if p.layer == layer]


def build_mag_nodes(
    seeds: SeedPairs, net_a: MultilayerNetwork, net_b: MultilayerNetwork
) -> tuple[tuple[MagNode, ...], dict[MagNode, float]]:
    """One MAG node per seed pair, with the similarity kept as metadata."""
    nodes = []
    similarity = {}
    for layer, pairs in seeds.by_layer.items():
        if layer >= net_a.n_layers:
            raise ValidationError(
                f"seed layer {layer} out of range for a {net_a.n_layers}-layer network"
            )
        for a, b, sim in pairs:
            if not net_a.has_node(layer, a):
                raise UnknownNode(f"seed references absent node {a!r} in layer {layer} of G1")
            if not net_b.has_node(layer, b):
                raise UnknownNode(f"seed references absent node {b!r} in layer {layer} of G2")
            node = MagNode(layer, a, b)
            nodes.append(node)
            similarity[node] = sim
    return tuple(sorted(nodes)), similarity


def classify_intra(
    net_a: MultilayerNetwork,
    net_b: MultilayerNetwork,
    layer: int,
    p: MagNode,
    q: MagNode,
    delta: int,
) -> Optional[EdgeKind]:
    """Homogeneous edge class for a same-layer MAG-node pair.

    Match: adjacent in both inputs. Gap: adjacent in one, within distance
    [2, delta] in the other. Mismatch: adjacent in one, farther than delta
    (or disconnected) in the other. No edge otherwise; in particular a
    pair sharing a node on one side (distance 0) never forms an edge.
    """
    if p.layer != layer or q.layer != layer:
        raise ValidationError("classify_intra needs both MAG nodes in the given layer")
    if p == q:
        raise ValidationError("classify_intra needs two distinct MAG nodes")
    d_a = bounded_distance(net_a, layer, p.a, q.a, delta)
    d_b = bounded_distance(net_b, layer, p.b, q.b, delta)
    a_adj = d_a == 1
    b_adj = d_b == 1
    if a_adj and b_adj:
        return EdgeKind.HOM_MATCH
    if a_adj != b_adj:
        other = d_b if a_adj else d_a
        if other is None:
            return EdgeKind.HOM_MISMATCH
        if 2 <= other <= delta:
            return EdgeKind.HOM_GAP
        return None
    return None


def classify_inter(
    net_a: MultilayerNetwork,
    net_b: MultilayerNetwork,
    p: MagNode,
    q: MagNode,
) -> Optional[EdgeKind]:
    """Heterogeneous edge class for a cross-layer MAG-node pair: match if
    the inter edge exists in both inputs, mismatch if in exactly one."""
    if p.layer == q.layer:
        raise ValidationError("classify_inter needs MAG nodes from different layers")
    for net, x, y in ((net_a, (p.layer, p.a), (q.layer, q.a)), (net_b, (p.layer, p.b), (q.layer, q.b))):
        for layer, label in (x, y):
            if not net.has_node(layer, label):
                raise UnknownNode(f"node {label!r} not in layer {layer}")
    in_a = net_a.has_inter_edge(p.layer, p.a, q.layer, q.a)
    in_b = net_b.has_inter_edge(p.layer, p.b, q.layer, q.b)
    if in_a and in_b:
        return EdgeKind.HET_MATCH
    if in_a != in_b:
        return EdgeKind.HET_MISMATCH
    return None


def _edge_key(p: MagNode, q: MagNode) -> tuple[MagNode, MagNode]:
    return (p, q) if p < q else (q, p)


def build_mag(
    net_a: MultilayerNetwork,
    net_b: MultilayerNetwork,
    seeds: SeedPairs,
    params: Optional[AlignmentParams] = None,
    provenance: tuple[str, str] = ("G1", "G2"),
) -> MultilayerAlignmentGraph:
    """Construct the full alignment graph.

    Candidate MAG-node pairs are enumerated edge-driven: only pairs with an
    underlying edge in at least one input are classified, which is exactly
    the set of pairs that can receive an edge.
    """
    if net_a.n_layers != net_b.n_layers:
        raise LayerMismatch(f"layer counts differ: {net_a.n_layers} vs {net_b.n_layers}")
    params = params or AlignmentParams()
    nodes, similarity = build_mag_nodes(seeds, net_a, net_b)

    by_a: dict[tuple[int, str], list[MagNode]] = {}
    by_b: dict[tuple[int, str], list[MagNode]] = {}
    for node in nodes:
        by_a.setdefault((node.layer, node.a), []).append(node)
        by_b.setdefault((node.layer, node.b), []).append(node)

    candidates: set[tuple[MagNode, MagNode]] = set()
    for k in range(net_a.n_layers):
        for net, index in ((net_a, by_a), (net_b, by_b)):
            for u, v in net.intra_edges[k]:
                for p in index.get((k, u), ()):
                    for q in index.get((k, v), ()):
                        if p != q:
                            candidates.add(_edge_key(p, q))

    edges: list[MagEdge] = []
    for p, q in candidates:
        kind = classify_intra(net_a, net_b, p.layer, p, q, params.delta)
        if kind is not None:
            edges.append(MagEdge(p, q, kind, params.weight_for(kind)))

    inter_candidates: set[tuple[MagNode, MagNode]] = set()
    for net, index in ((net_a, by_a), (net_b, by_b)):
        for (la, a), (lb, b) in net.inter_edges:
            for p in index.get((la, a), ()):
                for q in index.get((lb, b), ()):
                    inter_candidates.add(_edge_key(p, q))
    for p, q in inter_candidates:
        kind = classify_inter(net_a, net_b, p, q)
        if kind is not None:
            edges.append(MagEdge(p, q, kind, params.weight_for(kind)))

    return MultilayerAlignmentGraph(
        net_a.n_layers, nodes, similarity, edges, params, provenance
    )


def save_mag(mag: MultilayerAlignmentGraph, path) -> None:
    """Write the MAG edge list; rows sorted for byte-stable output."""
    out = [MAG_HEADER, f"#provenance G1={mag.provenance[0]} G2={mag.provenance[1]}"]
    for e in mag.edges:
        out.append(
            f"{e.u.layer}\t{e.u.a}|{e.u.b}\t{e.v.layer}\t{e.v.a}|{e.v.b}"
            f"\t{e.kind}\t{e.weight:g}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
