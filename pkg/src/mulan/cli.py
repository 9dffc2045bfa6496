"""Command-line front end: generate benchmark networks, align two networks,
evaluate an alignment, or run the full sweep end to end.

Exit codes: 0 success, 1 I/O or parse failure, 2 validation failure,
3 internal error. The MULAN_LOG environment variable sets log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import align as align_mod
from . import community as community_mod
from . import evaluate as eval_mod
from .errors import MulanError, ParseError, ValidationError
from .netgraph import MultilayerNetwork, load_network, save_network
from .synth import (
    NoiseSpec,
    SynthSpec,
    derive_seed,
    generate_multilayer,
    generation_comment,
    noise_comment,
    perturb,
)

log = logging.getLogger("mulan")

PIPELINE_REPORT_COLUMNS = (
    "network",
    "noise",
    "detector",
    "communities",
    "modularity",
    "f_nc_m",
    "ncv_gs3_m",
    "ncv_gs3_inter",
)

SUMMARY_COLUMNS = (
    "detector",
    "mag_nodes",
    "mag_edges",
    "communities",
    "modularity",
    "quality",
    "align_seconds",
    "detect_seconds",
)


def _parse_noise(text: str) -> list[int]:
    levels = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            pct = int(part)
        except ValueError:
            raise ValidationError(f"noise level must be an integer percent, got {part!r}") from None
        if not 0 <= pct < 100:
            raise ValidationError(f"noise percent must be in [0, 100), got {pct}")
        levels.append(pct)
    return levels


def _parse_weights(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise ValidationError(
            "--weights needs 5 comma-separated values: match,mismatch,gap,hmatch,hmismatch"
        )
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--weights values must be numbers, got {text!r}") from None


def _params_from_args(args) -> align_mod.AlignmentParams:
    w = _parse_weights(args.weights)
    return align_mod.AlignmentParams(
        delta=args.delta,
        w_match=w[0],
        w_mismatch=w[1],
        w_gap=w[2],
        w_hmatch=w[3],
        w_hmismatch=w[4],
    )


def _load_seeds(spec: str, net_a: MultilayerNetwork, net_b: MultilayerNetwork):
    if spec == "identity":
        return align_mod.SeedPairs.identity(net_a, net_b)
    return align_mod.load_seeds(spec)


def _truth_mapping(spec: str, net_a: MultilayerNetwork, net_b: MultilayerNetwork) -> eval_mod.Mapping:
    if spec == "identity":
        pairs = []
        for k in range(net_a.n_layers):
            common = net_a.nodes[k] & net_b.nodes[k]
            pairs.extend((k, x, x) for x in common)
        return eval_mod.Mapping.from_pairs(net_a.n_layers, pairs)
    seeds = align_mod.load_seeds(spec)
    return eval_mod.Mapping.from_pairs(
        max(seeds.by_layer, default=0) + 1,
        [(layer, a, b) for layer, a, b, _ in seeds.rows()],
    )


def _singleton_partition(graph: community_mod.WeightedFlatGraph, algorithm: str) -> community_mod.Partition:
    assignment = {node: i for i, node in enumerate(graph.nodes)}
    return community_mod.Partition(assignment, graph.n_nodes, 0.0, algorithm, None)


def _detect(graph, detector: str, seed: int):
    """Run a detector; an edgeless MAG degenerates to singletons with
    modularity reported as zero."""
    if graph.two_m == 0:
        return _singleton_partition(graph, detector), 0.0
    partition = community_mod.detect(graph, detector, seed)
    return partition, community_mod.modularity(graph, partition)


def _write_lines(path: Path, lines) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_generate(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = SynthSpec(
        n_layers=args.layers,
        n=args.nodes,
        m=args.ba_m,
        inter_fraction=args.inter_frac,
        rng_seed=derive_seed(args.seed, "gen"),
    )
    net = generate_multilayer(spec)
    base_path = outdir / "network.tsv"
    save_network(net, base_path, comments=[generation_comment(spec)])
    manifest = [f"{base_path}\t{spec.rng_seed}"]
    for pct in _parse_noise(args.noise):
        noise = NoiseSpec(pct / 100.0, derive_seed(args.seed, "noise", pct))
        noisy = perturb(net, noise)
        path = outdir / f"network_n{pct:02d}.tsv"
        save_network(noisy, path, comments=[generation_comment(spec), noise_comment(noise)])
        manifest.append(f"{path}\t{noise.rng_seed}")
    print("\n".join(manifest))
    return 0


def cmd_align(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    net_a = load_network(args.net1)
    net_b = load_network(args.net2)
    params = _params_from_args(args)
    seeds = _load_seeds(args.seeds, net_a, net_b)

    t0 = time.perf_counter()
    mag = align_mod.build_mag(
        net_a, net_b, seeds, params, provenance=(str(args.net1), str(args.net2))
    )
    align_seconds = time.perf_counter() - t0
    graph = community_mod.WeightedFlatGraph.from_mag(mag)

    t1 = time.perf_counter()
    partition, q = _detect(graph, args.detector, derive_seed(args.seed, "detect", args.detector))
    detect_seconds = time.perf_counter() - t1

    align_mod.save_mag(mag, outdir / "mag.tsv")
    community_mod.save_communities(partition, outdir / "communities.tsv")
    summary_row = "\t".join(
        [
            args.detector,
            str(mag.n_nodes),
            str(mag.n_edges),
            str(partition.n_communities),
            f"{q:.6f}",
            f"{partition.quality:.6f}",
            f"{align_seconds:.3f}",
            f"{detect_seconds:.3f}",
        ]
    )
    _write_lines(outdir / "summary.tsv", ["\t".join(SUMMARY_COLUMNS), summary_row])
    print("\t".join(SUMMARY_COLUMNS))
    print(summary_row)
    return 0


def cmd_eval(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    net_a = load_network(args.net1)
    net_b = load_network(args.net2)
    params = _params_from_args(args)
    seeds = _load_seeds(args.seeds, net_a, net_b)
    rows = community_mod.load_communities(args.communities)

    t0 = time.perf_counter()
    mag = align_mod.build_mag(net_a, net_b, seeds, params)
    known = set(mag.nodes)
    assignment = {}
    for cid, layer, a, b in rows:
        node = align_mod.MagNode(layer, a, b)
        if node not in known:
            raise ValidationError(
                f"communities file references pair {layer}:{a}|{b} absent from the alignment graph"
            )
        assignment[node] = cid

    n_communities = len(set(assignment.values()))
    graph = community_mod.WeightedFlatGraph.from_mag(mag)
    if assignment and graph.two_m > 0:
        next_cid = max(assignment.values()) + 1
        for node in mag.nodes:
            if node not in assignment:
                assignment[node] = next_cid
                next_cid += 1
        modularity_value = community_mod.modularity(graph, assignment)
    else:
        modularity_value = 0.0

    aligned = eval_mod.mapping_from_community_rows(rows, net_a.n_layers)
    truth = _truth_mapping(args.truth, net_a, net_b)
    report = eval_mod.evaluate_alignment(
        net_a,
        net_b,
        aligned,
        truth,
        n_communities,
        modularity_value,
        runtime_seconds=time.perf_counter() - t0,
    )
    label = args.label or f"{Path(args.net1).stem}|{Path(args.net2).stem}"
    _write_lines(
        outdir / "report.tsv",
        [
            eval_mod.report_header(net_a.n_layers),
            eval_mod.report_row(label, args.noise, args.detector_label, report),
        ],
    )
    print(eval_mod.summary_text(report))
    return 0


def _pipeline_cell(root_seed, base, noisy, params, detectors, index, pct, cell_dir):
    """Align one (network, noise) pair and run every detector on the MAG."""
    cell_dir.mkdir(parents=True, exist_ok=True)
    seeds = align_mod.SeedPairs.identity(base, noisy)
    t0 = time.perf_counter()
    mag = align_mod.build_mag(
        base, noisy, seeds, params, provenance=(f"net{index:02d}", f"net{index:02d}_n{pct:02d}")
    )
    align_seconds = time.perf_counter() - t0
    align_mod.save_mag(mag, cell_dir / f"net{index:02d}_n{pct:02d}.mag.tsv")
    graph = community_mod.WeightedFlatGraph.from_mag(mag)
    truth = eval_mod.Mapping.identity(base)

    rows = []
    for detector in detectors:
        seed_d = derive_seed(root_seed, "net", index, "noise", pct, detector)
        t1 = time.perf_counter()
        partition, q = _detect(graph, detector, seed_d)
        detect_seconds = time.perf_counter() - t1
        det_dir = cell_dir / f"net{index:02d}_n{pct:02d}_{detector}"
        det_dir.mkdir(parents=True, exist_ok=True)
        community_mod.save_communities(partition, det_dir / "communities.tsv")
        _write_lines(
            det_dir / "summary.tsv",
            [
                "\t".join(SUMMARY_COLUMNS),
                "\t".join(
                    [
                        detector,
                        str(mag.n_nodes),
                        str(mag.n_edges),
                        str(partition.n_communities),
                        f"{q:.6f}",
                        f"{partition.quality:.6f}",
                        f"{align_seconds:.3f}",
                        f"{detect_seconds:.3f}",
                    ]
                ),
            ],
        )
        aligned = eval_mod.extract_mapping(partition, mag)
        report = eval_mod.evaluate_alignment(
            base, noisy, aligned, truth, partition.n_communities, q,
            runtime_seconds=align_seconds + detect_seconds,
        )
        inter = "na" if report.ncv_gs3_inter is None else f"{report.ncv_gs3_inter:.6f}"
        rows.append(
            "\t".join(
                [
                    f"net{index:02d}",
                    str(pct),
                    detector,
                    str(partition.n_communities),
                    f"{q:.6f}",
                    f"{report.f_nc_m:.6f}",
                    f"{report.ncv_gs3_m:.6f}",
                    inter,
                ]
            )
        )
    return rows


def cmd_pipeline(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    noise_levels = _parse_noise(args.noise)
    if not noise_levels:
        raise ValidationError("pipeline needs at least one noise level")
    detectors = list(community_mod.DETECTORS) if args.detector == "all" else [args.detector]
    params = _params_from_args(args)

    (outdir / "networks").mkdir(parents=True, exist_ok=True)
    tasks = []
    for index in range(1, args.networks + 1):
        spec = SynthSpec(
            n_layers=args.layers,
            n=args.nodes,
            m=args.ba_m,
            inter_fraction=args.inter_frac,
            rng_seed=derive_seed(args.seed, "net", index),
        )
        base = generate_multilayer(spec)
        save_network(
            base, outdir / "networks" / f"net{index:02d}.tsv",
            comments=[generation_comment(spec)],
        )
        for pct in noise_levels:
            if pct == 0:
                noisy = base
            else:
                noise = NoiseSpec(pct / 100.0, derive_seed(args.seed, "net", index, "noise", pct))
                noisy = perturb(base, noise)
                save_network(
                    noisy, outdir / "networks" / f"net{index:02d}_n{pct:02d}.tsv",
                    comments=[generation_comment(spec), noise_comment(noise)],
                )
            tasks.append((index, pct, base, noisy))

    rows: list[tuple[tuple, str]] = []
    failures = []

    def run_cell(task):
        index, pct, base, noisy = task
        return _pipeline_cell(
            args.seed, base, noisy, params, detectors, index, pct, outdir / "cells"
        )

    def record(task, outcome, error=None):
        index, pct = task[0], task[1]
        if error is not None:
            failures.append((index, pct, error))
            log.error("cell net%02d noise %d failed: %s", index, pct, error)
            print(f"cell net{index:02d} noise {pct} failed: {error}", file=sys.stderr)
            return
        for row in outcome:
            detector = row.split("\t")[2]
            rows.append(((row.split("\t")[0], pct, detectors.index(detector)), row))

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(task, pool.submit(run_cell, task)) for task in tasks]
            for task, future in futures:
                try:
                    record(task, future.result())
                except Exception as exc:  # fail-fast per cell, keep the sweep going
                    record(task, None, exc)
    else:
        for task in tasks:
            try:
                record(task, run_cell(task))
            except Exception as exc:
                record(task, None, exc)

    rows.sort(key=lambda item: item[0])
    _write_lines(
        outdir / "report.tsv",
        ["\t".join(PIPELINE_REPORT_COLUMNS), *(row for _, row in rows)],
    )
    print(f"wrote {len(rows)} report rows to {outdir / 'report.tsv'}")
    if failures:
        print(f"{len(failures)} cells failed", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mulan",
        description="Local alignment of multilayer networks via community detection "
        "on a weighted alignment graph.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="root RNG seed (u64)")
        p.add_argument("-o", "--outdir", default=".", help="output directory")

    def add_align_params(p):
        p.add_argument("--delta", type=int, default=2, help="gap distance threshold")
        p.add_argument(
            "--weights",
            default="1,0.5,0.2,0.9,0.4",
            help="edge weights: match,mismatch,gap,hmatch,hmismatch",
        )

    p_gen = sub.add_parser("generate", help="generate a synthetic multilayer network")
    p_gen.add_argument("--layers", type=int, default=2)
    p_gen.add_argument("--nodes", type=int, default=1000)
    p_gen.add_argument("--ba-m", type=int, default=1, dest="ba_m")
    p_gen.add_argument("--inter-frac", type=float, default=0.30, dest="inter_frac")
    p_gen.add_argument("--noise", default="", help="comma-separated removal percents")
    add_common(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_align = sub.add_parser("align", help="align two networks and mine communities")
    p_align.add_argument("net1")
    p_align.add_argument("net2")
    p_align.add_argument("--seeds", default="identity", help="seed-pairs file or 'identity'")
    p_align.add_argument(
        "--detector", default="louvain", choices=(*community_mod.DETECTORS,)
    )
    add_align_params(p_align)
    add_common(p_align)
    p_align.set_defaults(func=cmd_align)

    p_eval = sub.add_parser("eval", help="score a communities file against the truth")
    p_eval.add_argument("net1")
    p_eval.add_argument("net2")
    p_eval.add_argument("--communities", required=True)
    p_eval.add_argument("--truth", default="identity", help="truth pairs file or 'identity'")
    p_eval.add_argument("--seeds", default="identity", help="seed-pairs file or 'identity'")
    p_eval.add_argument("--label", default="", help="network label for the report row")
    p_eval.add_argument("--noise", type=int, default=0, help="noise percent for the report row")
    p_eval.add_argument("--detector-label", default="-", dest="detector_label")
    add_align_params(p_eval)
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_pipe = sub.add_parser("pipeline", help="full sweep: generate, align, evaluate")
    p_pipe.add_argument("--networks", type=int, default=10)
    p_pipe.add_argument("--layers", type=int, default=2)
    p_pipe.add_argument("--nodes", type=int, default=1000)
    p_pipe.add_argument("--ba-m", type=int, default=1, dest="ba_m")
    p_pipe.add_argument("--inter-frac", type=float, default=0.30, dest="inter_frac")
    p_pipe.add_argument("--noise", default="0,5,10,15,20,25")
    p_pipe.add_argument(
        "--detector", default="louvain", choices=(*community_mod.DETECTORS, "all")
    )
    p_pipe.add_argument("--jobs", type=int, default=1)
    add_align_params(p_pipe)
    add_common(p_pipe)
    p_pipe.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("MULAN_LOG", "WARNING").upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MulanError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
