"""Alignment-quality metrics: F-NC, NCV, GS3, their per-layer combination,
multilayer averages, and the pooled inter-layer variant.

The aligned node mapping is read off a partition: every pair that sits in
a community of size >= 2 counts as aligned; singleton communities carry no
local-similarity evidence and contribute nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import EmptyTruth, SingleLayer, ValidationError
from .netgraph import MultilayerNetwork


@dataclass(frozen=True)
class Mapping:
    """Per-layer sets of (G1 node, G2 node) pairs."""

    per_layer: tuple[frozenset, ...]

    @classmethod
    def from_pairs(cls, n_layers: int, pairs: Iterable[tuple[int, str, str]]) -> "Mapping":
        buckets: list[set] = [set() for _ in range(n_layers)]
        for layer, a, b in pairs:
            if not 0 <= layer < n_layers:
                raise ValidationError(f"layer index {layer} out of range 0..{n_layers - 1}")
            buckets[layer].add((a, b))
        return cls(tuple(frozenset(s) for s in buckets))

    @classmethod
    def identity(cls, net: MultilayerNetwork) -> "Mapping":
        return cls(
            tuple(frozenset((x, x) for x in net.nodes[k]) for k in range(net.n_layers))
        )

    @property
    def n_layers(self) -> int:
        return len(self.per_layer)

    @property
    def n_pairs(self) -> int:
        return sum(len(s) for s in self.per_layer)


def extract_mapping(partition, mag) -> Mapping:
    """Aligned pairs are the members of all communities of size >= 2."""
    sizes: dict[int, int] = {}
    for cid in partition.assignment.values():
        sizes[cid] = sizes.get(cid, 0) + 1
    pairs = [
        (node.layer, node.a, node.b)
        for node, cid in partition.assignment.items()
        if sizes[cid] >= 2
    ]
    return Mapping.from_pairs(mag.n_layers, pairs)


def mapping_from_community_rows(
    rows: Sequence[tuple[int, int, str, str]], n_layers: int
) -> Mapping:
    """Same size->=2 rule, applied to rows read from a communities file."""
    sizes: dict[int, int] = {}
    for cid, _, _, _ in rows:
        sizes[cid] = sizes.get(cid, 0) + 1
    pairs = [(layer, a, b) for cid, layer, a, b in rows if sizes[cid] >= 2]
    return Mapping.from_pairs(n_layers, pairs)


def f_nc(aligned: Mapping, truth: Mapping, layer: int) -> tuple[float, float, float]:
    """Node correctness of the aligned pairs against the true mapping.

    Returns (precision, recall, f_score): |M & N| over |N|, over |M|, and
    their harmonic mean, with empty-set conventions giving zeros.
    """
    truth_pairs = truth.per_layer[layer]
    if not truth_pairs:
        raise EmptyTruth(f"true mapping is empty for layer {layer}")
    aligned_pairs = aligned.per_layer[layer]
    hits = len(aligned_pairs & truth_pairs)
    precision = hits / len(aligned_pairs) if aligned_pairs else 0.0
    recall = hits / len(truth_pairs)
    f_score = (
        2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    )
    return precision, recall, f_score


def _induced_intra(net: MultilayerNetwork, layer: int, keep: set) -> list:
    return [e for e in net.intra_edges[layer] if e[0] in keep and e[1] in keep]


def ncv_gs3(
    net_a: MultilayerNetwork, net_b: MultilayerNetwork, aligned: Mapping, layer: int
) -> tuple[float, float, float]:
    """Node coverage, conserved-substructure score, and their geometric mean
    for one layer.

    Conservation is counted once per aligned pair-of-pairs, which reduces to
    plain conserved-edge counting for one-to-one mappings.
    """
    pairs = aligned.per_layer[layer]
    v1 = {a for a, _ in pairs}
    v2 = {b for _, b in pairs}
    denom_nodes = len(net_a.nodes[layer]) + len(net_b.nodes[layer])
    ncv = (len(v1) + len(v2)) / denom_nodes if denom_nodes else 0.0

    e1 = _induced_intra(net_a, layer, v1)
    e2 = _induced_intra(net_b, layer, v2)
    by_a: dict[str, list] = {}
    for pair in pairs:
        by_a.setdefault(pair[0], []).append(pair)
    conserved_pairs = set()
    for u, v in e1:
        for p in by_a.get(u, ()):
            for q in by_a.get(v, ()):
                if net_b.has_intra_edge(layer, p[1], q[1]):
                    conserved_pairs.add((p, q) if p <= q else (q, p))
    conserved = len(conserved_pairs)
    denom_edges = len(e1) + len(e2) - conserved
    gs3 = conserved / denom_edges if denom_edges > 0 else 0.0
    return ncv, gs3, math.sqrt(ncv * gs3)


def ncv_gs3_inter(
    net_a: MultilayerNetwork, net_b: MultilayerNetwork, aligned: Mapping
) -> float:
    """The combined score with all inter-layer edges pooled and all aligned
    nodes pooled across layers."""
    if net_a.n_layers < 2 or net_b.n_layers < 2:
        raise SingleLayer("inter-layer score needs at least two layers")
    v1 = set()
    v2 = set()
    by_a: dict[tuple[int, str], list] = {}
    for layer, pairs in enumerate(aligned.per_layer):
        for a, b in pairs:
            v1.add((layer, a))
            v2.add((layer, b))
            by_a.setdefault((layer, a), []).append((layer, a, b))
    denom_nodes = net_a.n_nodes + net_b.n_nodes
    ncv = (len(v1) + len(v2)) / denom_nodes if denom_nodes else 0.0

    e1 = [
        e
        for e in net_a.inter_edges
        if e[0] in v1 and e[1] in v1
    ]
    e2 = sum(1 for e in net_b.inter_edges if e[0] in v2 and e[1] in v2)
    conserved_pairs = set()
    for (la, a), (lb, b) in e1:
        for p in by_a.get((la, a), ()):
            for q in by_a.get((lb, b), ()):
                if net_b.has_inter_edge(la, p[2], lb, q[2]):
                    conserved_pairs.add((p, q) if p <= q else (q, p))
    conserved = len(conserved_pairs)
    denom_edges = len(e1) + e2 - conserved
    gs3 = conserved / denom_edges if denom_edges > 0 else 0.0
    return math.sqrt(ncv * gs3)


def multilayer_aggregate(per_layer: Sequence[float]) -> float:
    """Unweighted arithmetic mean across layers."""
    if not per_layer:
        raise ValidationError("need at least one evaluated layer")
    return sum(per_layer) / len(per_layer)


@dataclass
class EvalReport:
    """All quality figures for one alignment run."""

    precision_layers: tuple[float, ...]
    recall_layers: tuple[float, ...]
    f_nc_layers: tuple[float, ...]
    ncv_gs3_layers: tuple[float, ...]
    f_nc_m: float
    ncv_gs3_m: float
    ncv_gs3_inter: Optional[float]
    n_communities: int
    modularity: float
    runtime_seconds: float

    @property
    def n_layers(self) -> int:
        return len(self.f_nc_layers)


def evaluate_alignment(
    net_a: MultilayerNetwork,
    net_b: MultilayerNetwork,
    aligned: Mapping,
    truth: Mapping,
    n_communities: int,
    modularity_value: float,
    runtime_seconds: float = 0.0,
) -> EvalReport:
    """Assemble the full report; the inter-layer score is skipped (None)
    for single-layer inputs."""
    precisions, recalls, f_scores, combined = [], [], [], []
    for layer in range(net_a.n_layers):
        p, r, f = f_nc(aligned, truth, layer)
        precisions.append(p)
        recalls.append(r)
        f_scores.append(f)
        combined.append(ncv_gs3(net_a, net_b, aligned, layer)[2])
    inter = ncv_gs3_inter(net_a, net_b, aligned) if net_a.n_layers >= 2 else None
    return EvalReport(
        tuple(precisions),
        tuple(recalls),
        tuple(f_scores),
        tuple(combined),
        multilayer_aggregate(f_scores),
        multilayer_aggregate(combined),
        inter,
        n_communities,
        modularity_value,
        runtime_seconds,
    )


def report_header(n_layers: int) -> str:
    columns = [
        "network",
        "noise",
        "detector",
        "n_communities",
        "modularity",
        "f_nc_m",
        "ncv_gs3_m",
        "ncv_gs3_inter",
        "runtime_seconds",
    ]
    for k in range(n_layers):
        columns += [f"precision_{k}", f"recall_{k}", f"f_nc_{k}", f"ncv_gs3_{k}"]
    return "\t".join(columns)


def _fmt(x: Optional[float]) -> str:
    return "na" if x is None else f"{x:.6f}"


def report_row(network: str, noise: int, detector: str, report: EvalReport) -> str:
    cells = [
        network,
        str(noise),
        detector,
        str(report.n_communities),
        _fmt(report.modularity),
        _fmt(report.f_nc_m),
        _fmt(report.ncv_gs3_m),
        _fmt(report.ncv_gs3_inter),
        f"{report.runtime_seconds:.3f}",
    ]
    for k in range(report.n_layers):
        cells += [
            _fmt(report.precision_layers[k]),
            _fmt(report.recall_layers[k]),
            _fmt(report.f_nc_layers[k]),
            _fmt(report.ncv_gs3_layers[k]),
        ]
    return "\t".join(cells)


def summary_text(report: EvalReport) -> str:
    lines = [
        f"communities: {report.n_communities}",
        f"modularity: {report.modularity:.6f}",
        f"F-NC (multilayer): {report.f_nc_m:.6f}",
        f"NCV-GS3 (multilayer): {report.ncv_gs3_m:.6f}",
        f"NCV-GS3 (inter): {_fmt(report.ncv_gs3_inter)}",
    ]
    for k in range(report.n_layers):
        lines.append(
            f"layer {k}: F-NC={report.f_nc_layers[k]:.6f} "
            f"(P={report.precision_layers[k]:.6f}, R={report.recall_layers[k]:.6f}) "
            f"NCV-GS3={report.ncv_gs3_layers[k]:.6f}"
        )
    return "\n".join(lines)
