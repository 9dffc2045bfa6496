"""Synthetic benchmark networks: preferential-attachment layers, random
inter-layer edges, and noise injection by uniform edge removal.

All randomness flows through explicit 64-bit seeds so that equal
(spec, seed) inputs give structurally equal outputs.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from .errors import InvalidSpec
from .netgraph import IntraEdge, MultilayerNetwork, inter_key, intra_key


def derive_seed(root: int, *tokens: object) -> int:
    """Split a root seed into an independent 64-bit stream seed.

    Hash-based so that streams for different token paths never collide by
    accident and the derivation is stable across platforms.
    """
    material = ":".join([str(root), *(str(t) for t in tokens)]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic multilayer network."""

    n_layers: int = 2
    n: int = 1000
    m: int = 1
    inter_fraction: float = 0.30
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_layers < 1:
            raise InvalidSpec(f"n_layers must be >= 1, got {self.n_layers}")
        if not 1 <= self.m < self.n:
            raise InvalidSpec(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        if not 0.0 <= self.inter_fraction <= 1.0:
            raise InvalidSpec(f"inter_fraction must be in [0, 1], got {self.inter_fraction}")

    def describe(self) -> str:
        return (
            f"layers={self.n_layers},n={self.n},m={self.m},"
            f"inter_fraction={self.inter_fraction}"
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Fraction of pooled intra+inter edges to remove."""

    fraction: float
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.fraction < 1.0:
            raise InvalidSpec(f"noise fraction must be in [0, 1), got {self.fraction}")


def generate_ba_layer(n: int, m: int, rng: random.Random) -> list[IntraEdge]:
    """Preferential-attachment edge list on nodes labeled "0".."n-1".

    Starts from m isolated seed nodes; every later node attaches to m
    distinct existing nodes picked with probability proportional to their
    current degree (the first attachment, where all degrees are zero, links
    all m seeds). Yields exactly (n - m) * m edges and a connected graph.
    """
    if not 1 <= m < n:
        raise InvalidSpec(f"need 1 <= m < n, got m={m}, n={n}")
    edges: list[IntraEdge] = []
    # One entry per unit of degree; sampling an index uniformly from this
    # list is sampling a node proportionally to its degree.
    repeated: list[int] = []
    for source in range(m, n):
        if not repeated:
            targets = list(range(m))
        else:
            chosen: set[int] = set()
            while len(chosen) < m:
                chosen.add(repeated[rng.randrange(len(repeated))])
            targets = sorted(chosen)
        for t in targets:
            edges.append(intra_key(str(source), str(t)))
            repeated.append(t)
        repeated.extend([source] * m)
    return edges


def generate_multilayer(spec: SynthSpec) -> MultilayerNetwork:
    """Independent preferential-attachment layers joined by random inter
    edges; round(inter_fraction * per-layer intra count) edges per adjacent
    layer pair, endpoints uniform, no duplicates."""
    nodes = [[str(i) for i in range(spec.n)] for _ in range(spec.n_layers)]
    intra = []
    for k in range(spec.n_layers):
        rng = random.Random(derive_seed(spec.rng_seed, "layer", k))
        intra.append(generate_ba_layer(spec.n, spec.m, rng))

    per_layer_intra = (spec.n - spec.m) * spec.m
    n_inter = round(spec.inter_fraction * per_layer_intra)
    inter: set = set()
    for k in range(spec.n_layers - 1):
        rng = random.Random(derive_seed(spec.rng_seed, "inter", k))
        pair_edges: set = set()
        while len(pair_edges) < n_inter:
            a = str(rng.randrange(spec.n))
            b = str(rng.randrange(spec.n))
            pair_edges.add(inter_key(k, a, k + 1, b))
        inter |= pair_edges

    return MultilayerNetwork(spec.n_layers, nodes, intra, inter)


def perturb(net: MultilayerNetwork, noise: NoiseSpec) -> MultilayerNetwork:
    """Remove floor(fraction * |E|) edges sampled uniformly without
    replacement from the pooled intra+inter edge set; nodes are kept."""
    pool: list[tuple] = []
    for k in range(net.n_layers):
        pool.extend(("intra", k, e) for e in sorted(net.intra_edges[k]))
    pool.extend(("inter", None, e) for e in sorted(net.inter_edges))

    n_remove = math.floor(noise.fraction * len(pool))
    rng = random.Random(noise.rng_seed)
    removed = set(rng.sample(range(len(pool)), n_remove))

    intra: list[set[IntraEdge]] = [set() for _ in range(net.n_layers)]
    inter = set()
    for idx, (kind, k, edge) in enumerate(pool):
        if idx in removed:
            continue
        if kind == "intra":
            intra[k].add(edge)
        else:
            inter.add(edge)
    return MultilayerNetwork(net.n_layers, net.nodes, intra, inter)


def generation_comment(spec: SynthSpec) -> str:
    """Comment row recording how a saved network was produced."""
    return f"gen seed={spec.rng_seed} spec={spec.describe()}"


def noise_comment(noise: NoiseSpec) -> str:
    return f"gen seed={noise.rng_seed} spec=noise,fraction={noise.fraction}"
