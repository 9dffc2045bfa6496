"""Multilayer-network data model, validation, and edge-list I/O.

A network is a set of layers, each holding its own nodes and undirected,
unweighted intra-layer edges, plus inter-layer edges between nodes of
different layers. Node labels are namespaced by layer: the same label in
two layers denotes two distinct nodes.

File format (TSV, UTF-8, LF):

    #mulan-net v1 layers=<k>
    <kind>\\t<layer_a>\\t<node_a>\\t<layer_b>\\t<node_b>

with kind in {intra, inter, node}; intra rows have layer_a == layer_b,
inter rows have layer_a != layer_b, and ``node`` rows declare isolated
nodes as ``node\\t<layer>\\t<label>\\t-\\t-``. Extra lines starting with
``#`` are comments and are ignored on load.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ParseError, UnknownNode, ValidationError

HEADER_PREFIX = "#mulan-net v1 layers="

# Canonical forms: an intra edge is a (u, v) tuple with u < v; an inter edge
# is ((layer_a, u), (layer_b, v)) with layer_a < layer_b.
IntraEdge = tuple[str, str]
InterEdge = tuple[tuple[int, str], tuple[int, str]]


@dataclass(frozen=True)
class LayerId:
    """A layer position; indices are contiguous 0..k-1."""

    index: int
    name: str = ""

    def __post_init__(self):
        if self.index < 0:
            raise ValidationError(f"layer index must be non-negative, got {self.index}")
        if not self.name:
            object.__setattr__(self, "name", f"layer{self.index}")


def validate_label(label: str) -> str:
    if not label:
        raise ValidationError("node label must be non-empty")
    if "\t" in label or "\n" in label or "\r" in label:
        raise ValidationError(f"node label contains reserved whitespace: {label!r}")
    return label


def intra_key(u: str, v: str) -> IntraEdge:
    return (u, v) if u < v else (v, u)


def inter_key(layer_a: int, a: str, layer_b: int, b: str) -> InterEdge:
    if layer_a < layer_b:
        return ((layer_a, a), (layer_b, b))
    return ((layer_b, b), (layer_a, a))


class MultilayerNetwork:
    """Immutable multilayer graph; validated on construction."""

    def __init__(
        self,
        n_layers: int,
        nodes: Sequence[Iterable[str]],
        intra_edges: Sequence[Iterable[IntraEdge]],
        inter_edges: Iterable[InterEdge],
        layer_names: Optional[Sequence[str]] = None,
    ):
        if n_layers < 1:
            raise ValidationError(f"need at least one layer, got {n_layers}")
        if len(nodes) != n_layers or len(intra_edges) != n_layers:
            raise ValidationError("nodes and intra_edges must have one entry per layer")
        names = list(layer_names) if layer_names is not None else [""] * n_layers
        self.layers: tuple[LayerId, ...] = tuple(
            LayerId(i, names[i]) for i in range(n_layers)
        )
        self.nodes: tuple[frozenset[str], ...] = tuple(
            frozenset(validate_label(x) for x in layer_nodes) for layer_nodes in nodes
        )

        intra: list[frozenset[IntraEdge]] = []
        for k, layer_edges in enumerate(intra_edges):
            canon = set()
            for u, v in layer_edges:
                if u == v:
                    raise ValidationError(f"self-loop on {u!r} in layer {k}")
                if u not in self.nodes[k] or v not in self.nodes[k]:
                    raise UnknownNode(f"intra edge ({u!r}, {v!r}) references a node absent from layer {k}")
                canon.add(intra_key(u, v))
            intra.append(frozenset(canon))
        self.intra_edges: tuple[frozenset[IntraEdge], ...] = tuple(intra)

        canon_inter = set()
        for (la, a), (lb, b) in inter_edges:
            if la == lb:
                raise ValidationError(f"inter edge within single layer {la}: ({a!r}, {b!r})")
            for layer, label in ((la, a), (lb, b)):
                if not 0 <= layer < n_layers:
                    raise ValidationError(f"layer index {layer} out of range 0..{n_layers - 1}")
                if label not in self.nodes[layer]:
                    raise UnknownNode(f"inter edge references absent node {label!r} in layer {layer}")
            canon_inter.add(inter_key(la, a, lb, b))
        self.inter_edges: frozenset[InterEdge] = frozenset(canon_inter)

        # Intra-layer adjacency, precomputed once; the network never mutates.
        adj: list[dict[str, tuple[str, ...]]] = []
        for k in range(n_layers):
            d: dict[str, list[str]] = {x: [] for x in self.nodes[k]}
            for u, v in self.intra_edges[k]:
                d[u].append(v)
                d[v].append(u)
            adj.append({x: tuple(sorted(ys)) for x, ys in d.items()})
        self._adj = tuple(adj)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def n_nodes(self) -> int:
        return sum(len(s) for s in self.nodes)

    @property
    def n_intra_edges(self) -> int:
        return sum(len(s) for s in self.intra_edges)

    @property
    def n_inter_edges(self) -> int:
        return len(self.inter_edges)

    @property
    def n_edges(self) -> int:
        return self.n_intra_edges + self.n_inter_edges

    def has_node(self, layer: int, label: str) -> bool:
        return 0 <= layer < self.n_layers and label in self.nodes[layer]

    def has_intra_edge(self, layer: int, u: str, v: str) -> bool:
        return intra_key(u, v) in self.intra_edges[layer]

    def has_inter_edge(self, layer_a: int, a: str, layer_b: int, b: str) -> bool:
        return inter_key(layer_a, a, layer_b, b) in self.inter_edges

    def neighbors(self, layer: int, u: str) -> tuple[str, ...]:
        try:
            return self._adj[layer][u]
        except KeyError:
            raise UnknownNode(f"node {u!r} not in layer {layer}") from None

    def isolated_nodes(self, layer: int) -> frozenset[str]:
        """Nodes of a layer with no intra- and no inter-layer edge."""
        touched = {u for e in self.intra_edges[layer] for u in e}
        for (la, a), (lb, b) in self.inter_edges:
            if la == layer:
                touched.add(a)
            if lb == layer:
                touched.add(b)
        return self.nodes[layer] - touched

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilayerNetwork):
            return NotImplemented
        return (
            self.n_layers == other.n_layers
            and self.nodes == other.nodes
            and self.intra_edges == other.intra_edges
            and self.inter_edges == other.inter_edges
        )

    __hash__ = None  # mutable-equality semantics; not intended as a dict key

    def __repr__(self) -> str:
        return (
            f"MultilayerNetwork(layers={self.n_layers}, nodes={self.n_nodes}, "
            f"intra={self.n_intra_edges}, inter={self.n_inter_edges})"
        )


def bounded_distance(
    net: MultilayerNetwork, layer: int, u: str, v: str, cap: int
) -> Optional[int]:
    """Unweighted shortest-path length between u and v inside one layer.

    Returns the exact distance when it is <= cap, and None ("beyond") when
    the nodes are farther apart than cap or disconnected. Symmetric in
    (u, v); distance 0 iff u == v.
    """
    if cap < 1:
        raise ValidationError(f"cap must be >= 1, got {cap}")
    if not net.has_node(layer, u):
        raise UnknownNode(f"node {u!r} not in layer {layer}")
    if not net.has_node(layer, v):
        raise UnknownNode(f"node {v!r} not in layer {layer}")
    if u == v:
        return 0
    seen = {u}
    frontier = [u]
    for dist in range(1, cap + 1):
        nxt = []
        for x in frontier:
            for y in net._adj[layer][x]:
                if y == v:
                    return dist
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            return None
        frontier = nxt
    return None


def _parse_layer(path, line_no: int, field: str, n_layers: int) -> int:
    try:
        k = int(field)
    except ValueError:
        raise ParseError(path, line_no, f"layer index is not an integer: {field!r}") from None
    if not 0 <= k < n_layers:
        raise ValidationError(f"{path}:{line_no}: layer index {k} out of range 0..{n_layers - 1}")
    return k


def load_network(path) -> MultilayerNetwork:
    """Read a network file, validating structure line by line."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(HEADER_PREFIX):
        raise ParseError(path, 1, f"missing header {HEADER_PREFIX!r}<k>")
    try:
        n_layers = int(lines[0][len(HEADER_PREFIX):])
    except ValueError:
        raise ParseError(path, 1, "layer count in header is not an integer") from None
    if n_layers < 1:
        raise ValidationError(f"{path}:1: need at least one layer, got {n_layers}")

    nodes: list[set[str]] = [set() for _ in range(n_layers)]
    intra: list[set[IntraEdge]] = [set() for _ in range(n_layers)]
    inter: set[InterEdge] = set()

    for line_no, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ParseError(path, line_no, f"expected 5 tab-separated fields, got {len(fields)}")
        kind, f_la, a, f_lb, b = fields
        if kind == "node":
            if f_lb != "-" or b != "-":
                raise ParseError(path, line_no, "node row must end with two '-' fields")
            k = _parse_layer(path, line_no, f_la, n_layers)
            try:
                nodes[k].add(validate_label(a))
            except ValidationError as exc:
                raise ParseError(path, line_no, str(exc)) from None
            continue
        if kind not in ("intra", "inter"):
            raise ParseError(path, line_no, f"unknown row kind {kind!r}")
        la = _parse_layer(path, line_no, f_la, n_layers)
        lb = _parse_layer(path, line_no, f_lb, n_layers)
        try:
            validate_label(a)
            validate_label(b)
        except ValidationError as exc:
            raise ParseError(path, line_no, str(exc)) from None
        if kind == "intra":
            if la != lb:
                raise ValidationError(f"{path}:{line_no}: intra edge spans layers {la} and {lb}")
            if a == b:
                raise ValidationError(f"{path}:{line_no}: self-loop on {a!r}")
            key = intra_key(a, b)
            if key in intra[la]:
                raise ValidationError(f"{path}:{line_no}: duplicate intra edge {key}")
            intra[la].add(key)
            nodes[la].update(key)
        else:
            if la == lb:
                raise ValidationError(f"{path}:{line_no}: inter edge within single layer {la}")
            key = inter_key(la, a, lb, b)
            if key in inter:
                raise ValidationError(f"{path}:{line_no}: duplicate inter edge {key}")
            inter.add(key)
            nodes[la].add(a)
            nodes[lb].add(b)

    return MultilayerNetwork(n_layers, nodes, intra, inter)


def save_network(net: MultilayerNetwork, path, comments: Sequence[str] = ()) -> None:
    """Write a network file; output is byte-identical for equal networks.

    Rows are sorted by (kind, layer index, labels) with intra before inter
    before node declarations; only isolated nodes get declaration rows.
    """
    out = [f"{HEADER_PREFIX}{net.n_layers}"]
    for comment in comments:
        out.append(f"#{comment}")
    for k in range(net.n_layers):
        for u, v in sorted(net.intra_edges[k]):
            out.append(f"intra\t{k}\t{u}\t{k}\t{v}")
    for (la, a), (lb, b) in sorted(net.inter_edges):
        out.append(f"inter\t{la}\t{a}\t{lb}\t{b}")
    for k in range(net.n_layers):
        for label in sorted(net.isolated_nodes(k)):
            out.append(f"node\t{k}\t{label}\t-\t-")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write network file {path}: {exc}") from exc
