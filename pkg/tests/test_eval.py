import math

import pytest

from mulan.align import SeedPairs, build_mag
from mulan.community import Partition, WeightedFlatGraph, louvain
from mulan.errors import EmptyTruth, SingleLayer
from mulan.evaluate import (
    Mapping,
    evaluate_alignment,
    extract_mapping,
    f_nc,
    mapping_from_community_rows,
    multilayer_aggregate,
    ncv_gs3,
    ncv_gs3_inter,
)
from mulan.netgraph import MultilayerNetwork
from mulan.synth import NoiseSpec, SynthSpec, generate_multilayer, perturb


def one_layer(edges, nodes=()):
    labels = set(nodes)
    for u, v in edges:
        labels.update((u, v))
    return MultilayerNetwork(1, [labels], [edges], [])


def two_layer(intra0, intra1, inter):
    nodes = [set(), set()]
    for k, layer_edges in enumerate((intra0, intra1)):
        for u, v in layer_edges:
            nodes[k].update((u, v))
    for (la, a), (lb, b) in inter:
        nodes[la].add(a)
        nodes[lb].add(b)
    return MultilayerNetwork(2, nodes, [intra0, intra1], inter)


def mapping(n_layers, *pairs):
    return Mapping.from_pairs(n_layers, pairs)


def partition_of(mag, groups):
    assignment = {}
    for cid, members in enumerate(groups):
        for node in members:
            assignment[node] = cid
    return Partition(assignment, len(groups), 0.0, "test", None)


def test_extract_mapping_rules():
    net = generate_multilayer(SynthSpec(n_layers=2, n=20, m=1, inter_fraction=0.2, rng_seed=1))
    mag = build_mag(net, net, SeedPairs.identity(net, net))
    nodes = list(mag.nodes)

    singletons = partition_of(mag, [[n] for n in nodes])
    assert extract_mapping(singletons, mag).n_pairs == 0

    whole = partition_of(mag, [nodes])
    extracted = extract_mapping(whole, mag)
    assert extracted.n_pairs == mag.n_nodes


def test_extract_mapping_mixed_example():
    net = one_layer([("A", "B")], nodes=["C", "D"])
    seeds = SeedPairs([(0, "A", "A", 1.0), (0, "B", "B", 1.0), (0, "C", "D", 1.0)])
    mag = build_mag(net, net, seeds)
    by_pair = {(n.a, n.b): n for n in mag.nodes}
    part = partition_of(
        mag, [[by_pair[("A", "A")], by_pair[("B", "B")]], [by_pair[("C", "D")]]]
    )
    extracted = extract_mapping(part, mag)
    assert extracted.per_layer[0] == frozenset({("A", "A"), ("B", "B")})


def test_f_nc_perfect():
    truth = mapping(1, (0, "a", "a"), (0, "b", "b"))
    assert f_nc(truth, truth, 0) == (1.0, 1.0, 1.0)


def test_f_nc_half_recall():
    truth = mapping(1, (0, "a", "a"), (0, "b", "b"))
    aligned = mapping(1, (0, "a", "a"))
    p, r, f = f_nc(aligned, truth, 0)
    assert (p, r) == (1.0, 0.5)
    assert f == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_f_nc_disjoint_and_empty():
    truth = mapping(1, (0, "a", "a"))
    aligned = mapping(1, (0, "b", "b"))
    assert f_nc(aligned, truth, 0) == (0.0, 0.0, 0.0)
    assert f_nc(mapping(1), truth, 0) == (0.0, 0.0, 0.0)
    with pytest.raises(EmptyTruth):
        f_nc(aligned, mapping(1), 0)


def test_ncv_gs3_identity_self_alignment():
    net = one_layer([("a", "b"), ("b", "c")])
    aligned = mapping(1, (0, "a", "a"), (0, "b", "b"), (0, "c", "c"))
    assert ncv_gs3(net, net, aligned, 0) == (1.0, 1.0, 1.0)


def test_ncv_gs3_triangle_minus_edge():
    tri = one_layer([("a", "b"), ("b", "c"), ("a", "c")])
    minus = one_layer([("a", "b"), ("b", "c")])
    aligned = mapping(1, (0, "a", "a"), (0, "b", "b"), (0, "c", "c"))
    ncv, gs3, combined = ncv_gs3(tri, minus, aligned, 0)
    assert ncv == 1.0
    assert gs3 == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert combined == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-12)


def test_ncv_gs3_empty_mapping():
    net = one_layer([("a", "b")])
    assert ncv_gs3(net, net, mapping(1), 0) == (0.0, 0.0, 0.0)


def test_gs3_symmetric_under_swap():
    net_a = one_layer([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
    net_b = one_layer([("a", "b"), ("b", "c"), ("c", "d")])
    aligned = mapping(1, (0, "a", "a"), (0, "b", "b"), (0, "c", "c"), (0, "d", "d"))
    swapped = mapping(1, *[(0, b, a) for a, b in aligned.per_layer[0]])
    gs3_ab = ncv_gs3(net_a, net_b, aligned, 0)[1]
    gs3_ba = ncv_gs3(net_b, net_a, swapped, 0)[1]
    assert gs3_ab == pytest.approx(gs3_ba, abs=1e-12)


def test_conserved_count_monotone_under_edge_removal():
    net = generate_multilayer(SynthSpec(n_layers=2, n=40, m=1, inter_fraction=0.3, rng_seed=9))
    aligned = Mapping.identity(net)
    previous = None
    for fraction in (0.0, 0.2, 0.4):
        noisy = perturb(net, NoiseSpec(fraction, rng_seed=2))
        gs3 = ncv_gs3(net, noisy, aligned, 0)[1]
        if previous is not None:
            assert gs3 <= previous + 1e-12
        previous = gs3


def test_multilayer_aggregate():
    assert multilayer_aggregate([0.7]) == pytest.approx(0.7)
    assert multilayer_aggregate([0.6, 0.8]) == pytest.approx(0.7)
    assert multilayer_aggregate([0.4, 0.4, 0.4]) == pytest.approx(0.4)


def test_ncv_gs3_inter_self_alignment():
    net = two_layer([("a", "b")], [("x", "y")], [((0, "a"), (1, "x")), ((0, "b"), (1, "y"))])
    aligned = Mapping.identity(net)
    assert ncv_gs3_inter(net, net, aligned) == pytest.approx(1.0)


def test_ncv_gs3_inter_no_conservable_edges():
    net_a = two_layer([("a", "b")], [("x", "y")], [((0, "a"), (1, "x"))])
    net_b = two_layer([("a", "b")], [("x", "y")], [])
    # net_b keeps the nodes but no inter edges.
    net_b = MultilayerNetwork(2, net_a.nodes, net_a.intra_edges, [])
    aligned = Mapping.identity(net_a)
    assert ncv_gs3_inter(net_a, net_b, aligned) == 0.0


def test_ncv_gs3_inter_half_conserved():
    net_a = two_layer(
        [], [], [((0, "a"), (1, "x")), ((0, "b"), (1, "y"))]
    )
    net_b = MultilayerNetwork(
        2, net_a.nodes, net_a.intra_edges, [((0, "a"), (1, "x"))]
    )
    aligned = Mapping.identity(net_a)
    # Both inter edges induced in the first network, one in the second,
    # one conserved: GS3 = 1 / (2 + 1 - 1); NCV = 1.
    gs3 = 0.5
    assert ncv_gs3_inter(net_a, net_b, aligned) == pytest.approx(math.sqrt(gs3))


def test_ncv_gs3_inter_needs_two_layers():
    net = one_layer([("a", "b")])
    with pytest.raises(SingleLayer):
        ncv_gs3_inter(net, net, Mapping.identity(net))


def test_self_alignment_single_community_is_all_ones():
    net = generate_multilayer(SynthSpec(n_layers=2, n=50, m=1, inter_fraction=0.3, rng_seed=4))
    mag = build_mag(net, net, SeedPairs.identity(net, net))
    part = partition_of(mag, [list(mag.nodes)])
    aligned = extract_mapping(part, mag)
    truth = Mapping.identity(net)
    report = evaluate_alignment(net, net, aligned, truth, 1, 0.0)
    assert report.f_nc_m == 1.0
    assert report.ncv_gs3_m == 1.0
    assert report.ncv_gs3_inter == 1.0
    assert all(v == 1.0 for v in report.f_nc_layers)
    assert all(v == 1.0 for v in report.ncv_gs3_layers)


def test_mapping_from_community_rows_matches_extract():
    net = generate_multilayer(SynthSpec(n_layers=2, n=30, m=1, inter_fraction=0.3, rng_seed=5))
    mag = build_mag(net, net, SeedPairs.identity(net, net))
    g = WeightedFlatGraph.from_mag(mag)
    part = louvain(g, seed=0)
    rows = [(cid, n.layer, n.a, n.b) for n, cid in part.assignment.items()]
    from_rows = mapping_from_community_rows(rows, net.n_layers)
    from_part = extract_mapping(part, mag)
    assert from_rows.per_layer == from_part.per_layer


def test_metrics_stay_in_unit_interval():
    net = generate_multilayer(SynthSpec(n_layers=2, n=60, m=1, inter_fraction=0.3, rng_seed=6))
    noisy = perturb(net, NoiseSpec(0.3, rng_seed=7))
    mag = build_mag(net, noisy, SeedPairs.identity(net, noisy))
    g = WeightedFlatGraph.from_mag(mag)
    part = louvain(g, seed=0)
    aligned = extract_mapping(part, mag)
    report = evaluate_alignment(net, noisy, aligned, Mapping.identity(net), part.n_communities, part.quality)
    values = [
        report.f_nc_m,
        report.ncv_gs3_m,
        report.ncv_gs3_inter,
        *report.f_nc_layers,
        *report.ncv_gs3_layers,
        *report.precision_layers,
        *report.recall_layers,
    ]
    assert all(0.0 <= v <= 1.0 for v in values)
    for f, p, r in zip(report.f_nc_layers, report.precision_layers, report.recall_layers):
        assert f <= max(p, r) + 1e-12
