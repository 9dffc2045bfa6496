import filecmp
import os

import pytest

from mulan.cli import PIPELINE_REPORT_COLUMNS, main
from mulan.netgraph import load_network, save_network
from mulan.synth import SynthSpec, generate_multilayer


def run(*argv):
    return main([str(a) for a in argv])


def tree_files(root):
    out = {}
    for dirpath, _, filenames in os.walk(root):
        for name in filenames:
            path = os.path.join(dirpath, name)
            out[os.path.relpath(path, root)] = path
    return out


def test_generate_writes_base_and_noisy_files(tmp_path, capsys):
    rc = run(
        "generate", "--layers", 2, "--nodes", 200, "--ba-m", 1,
        "--inter-frac", 0.30, "--noise", "5,10,15,20,25", "--seed", 7, "-o", tmp_path,
    )
    assert rc == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == [
        "network.tsv",
        "network_n05.tsv",
        "network_n10.tsv",
        "network_n15.tsv",
        "network_n20.tsv",
        "network_n25.tsv",
    ]
    manifest = capsys.readouterr().out.strip().splitlines()
    assert len(manifest) == 6
    base = load_network(tmp_path / "network.tsv")
    assert base.n_nodes == 400
    noisy = load_network(tmp_path / "network_n25.tsv")
    assert noisy.n_edges < base.n_edges
    assert noisy.nodes == base.nodes


def test_generate_empty_noise_list(tmp_path):
    rc = run("generate", "--nodes", 50, "--noise", "", "--seed", 1, "-o", tmp_path)
    assert rc == 0
    assert [p.name for p in tmp_path.iterdir()] == ["network.tsv"]


def test_generate_deterministic(tmp_path):
    for sub in ("a", "b"):
        rc = run("generate", "--nodes", 80, "--noise", "10", "--seed", 42, "-o", tmp_path / sub)
        assert rc == 0
    for name in ("network.tsv", "network_n10.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_align_self_alignment_outputs(tmp_path, capsys):
    run("generate", "--nodes", 300, "--noise", "", "--seed", 3, "-o", tmp_path / "gen")
    net = tmp_path / "gen" / "network.tsv"
    rc = run("align", net, net, "--detector", "louvain", "--seed", 5, "-o", tmp_path / "out")
    assert rc == 0
    for name in ("mag.tsv", "communities.tsv", "summary.tsv"):
        assert (tmp_path / "out" / name).exists()
    header, row = (tmp_path / "out" / "summary.tsv").read_text().splitlines()
    cells = dict(zip(header.split("\t"), row.split("\t")))
    assert cells["detector"] == "louvain"
    assert int(cells["mag_nodes"]) == 600
    assert int(cells["communities"]) > 1
    assert 0.0 <= float(cells["modularity"]) <= 1.0
    assert float(cells["align_seconds"]) >= 0.0


def test_align_layer_mismatch_exit_2(tmp_path):
    net2 = generate_multilayer(SynthSpec(n_layers=2, n=30, m=1, inter_fraction=0.2, rng_seed=1))
    net3 = generate_multilayer(SynthSpec(n_layers=3, n=30, m=1, inter_fraction=0.2, rng_seed=1))
    p2, p3 = tmp_path / "two.tsv", tmp_path / "three.tsv"
    save_network(net2, p2)
    save_network(net3, p3)
    rc = run("align", p2, p3, "-o", tmp_path / "out")
    assert rc == 2


def test_align_missing_file_exit_1(tmp_path):
    rc = run("align", tmp_path / "nope.tsv", tmp_path / "nope.tsv", "-o", tmp_path)
    assert rc == 1


def test_align_bad_weights_exit_2(tmp_path):
    run("generate", "--nodes", 30, "--noise", "", "--seed", 1, "-o", tmp_path)
    net = tmp_path / "network.tsv"
    rc = run("align", net, net, "--weights", "1,2", "-o", tmp_path / "out")
    assert rc == 2


def test_eval_zero_noise_self_alignment(tmp_path, capsys):
    run("generate", "--nodes", 250, "--noise", "", "--seed", 9, "-o", tmp_path / "gen")
    net = tmp_path / "gen" / "network.tsv"
    run("align", net, net, "--seed", 9, "-o", tmp_path / "out")
    rc = run(
        "eval", net, net,
        "--communities", tmp_path / "out" / "communities.tsv",
        "--truth", "identity", "-o", tmp_path / "eval",
    )
    assert rc == 0
    header, row = (tmp_path / "eval" / "report.tsv").read_text().splitlines()
    cells = dict(zip(header.split("\t"), row.split("\t")))
    assert float(cells["f_nc_m"]) >= 0.95
    assert float(cells["ncv_gs3_m"]) > 0.0
    assert int(cells["n_communities"]) > 1


def test_eval_empty_communities_all_zero_metrics(tmp_path):
    run("generate", "--nodes", 60, "--noise", "", "--seed", 2, "-o", tmp_path / "gen")
    net = tmp_path / "gen" / "network.tsv"
    communities = tmp_path / "empty.tsv"
    communities.write_text("#mulan-communities v1\n", encoding="utf-8")
    rc = run("eval", net, net, "--communities", communities, "-o", tmp_path / "eval")
    assert rc == 0
    header, row = (tmp_path / "eval" / "report.tsv").read_text().splitlines()
    cells = dict(zip(header.split("\t"), row.split("\t")))
    assert float(cells["f_nc_m"]) == 0.0
    assert float(cells["ncv_gs3_m"]) == 0.0
    assert float(cells["ncv_gs3_inter"]) == 0.0
    assert int(cells["n_communities"]) == 0
    assert float(cells["modularity"]) == 0.0


def test_eval_dangling_reference_exit_2(tmp_path):
    run("generate", "--nodes", 40, "--noise", "", "--seed", 2, "-o", tmp_path / "gen")
    net = tmp_path / "gen" / "network.tsv"
    communities = tmp_path / "bad.tsv"
    communities.write_text("#mulan-communities v1\n0\t0\tghost|ghost\n", encoding="utf-8")
    rc = run("eval", net, net, "--communities", communities, "-o", tmp_path / "eval")
    assert rc == 2


def test_pipeline_single_cell_report(tmp_path):
    rc = run(
        "pipeline", "--networks", 1, "--nodes", 80, "--noise", "0",
        "--detector", "louvain", "--seed", 4, "-o", tmp_path,
    )
    assert rc == 0
    lines = (tmp_path / "report.tsv").read_text().splitlines()
    assert lines[0] == "\t".join(PIPELINE_REPORT_COLUMNS)
    assert len(lines) == 2
    assert lines[1].startswith("net01\t0\tlouvain\t")


def test_pipeline_report_shape_all_detectors(tmp_path):
    rc = run(
        "pipeline", "--networks", 2, "--nodes", 60, "--noise", "0,20",
        "--detector", "all", "--seed", 4, "-o", tmp_path,
    )
    assert rc == 0
    lines = (tmp_path / "report.tsv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 2 * 3
    # Rows are sorted by (network, noise, detector order).
    first = lines[1].split("\t")
    assert first[:3] == ["net01", "0", "louvain"]


def test_pipeline_deterministic_reruns(tmp_path):
    for sub in ("a", "b"):
        rc = run(
            "pipeline", "--networks", 1, "--nodes", 70, "--noise", "0,10",
            "--detector", "all", "--seed", 11, "-o", tmp_path / sub,
        )
        assert rc == 0
    files_a = tree_files(tmp_path / "a")
    files_b = tree_files(tmp_path / "b")
    assert set(files_a) == set(files_b)
    for rel, path_a in files_a.items():
        if os.path.basename(rel) == "summary.tsv":
            continue  # carries wall-clock runtimes
        with open(path_a, "rb") as fa, open(files_b[rel], "rb") as fb:
            assert fa.read() == fb.read(), rel


def test_pipeline_jobs_flag_matches_serial(tmp_path):
    for sub, jobs in (("serial", 1), ("parallel", 3)):
        rc = run(
            "pipeline", "--networks", 2, "--nodes", 50, "--noise", "0,10",
            "--seed", 8, "--jobs", jobs, "-o", tmp_path / sub,
        )
        assert rc == 0
    report_a = (tmp_path / "serial" / "report.tsv").read_bytes()
    report_b = (tmp_path / "parallel" / "report.tsv").read_bytes()
    assert report_a == report_b
