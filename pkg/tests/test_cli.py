"""End-to-end checks of the command line entry point.

Every test drives ``main`` in process and inspects the files it leaves
behind, comparing them against the library calls the commands wrap.
"""

from __future__ import annotations

import json

import pytest

from dagconsensus import (
    Config,
    FusionInput,
    dag_to_cpdag,
    fuse,
    mean_smhd,
    pdag_to_dag,
    prefix_state,
    run,
    select_theta,
    smhd,
)
from dagconsensus.cli import main
from dagconsensus.serialize import (
    format_metrics_csv,
    load_trajectory,
    trajectory_metrics_rows,
)
from dagconsensus.textio import (
    format_graph,
    read_dag,
    read_ordering,
    read_pdag,
    write_graph,
    write_ordering,
)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_worked_inputs(worked, tmp_path):
    _, graphs, sigma = worked
    paths = []
    for i, g in enumerate(graphs, start=1):
        path = tmp_path / f"in_{i}.graph"
        write_graph(g, path)
        paths.append(str(path))
    sigma_path = tmp_path / "sigma.txt"
    write_ordering(sigma, sigma_path)
    return paths, str(sigma_path)


def read_manifest(out_dir):
    with open(out_dir / "manifest.json", "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out == "0.1.0\n"


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_synth_writes_gold_inputs_and_manifest(tmp_path):
    out = tmp_path / "data"
    assert main(["synth", "-n", "6", "-r", "4", "--seed", "9", "-o", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "manifest.json",
        "synth_1.graph",
        "synth_2.graph",
        "synth_3.graph",
        "synth_4.graph",
        "synth_gold.graph",
    ]
    gold = read_dag(out / "synth_gold.graph")
    for i in range(1, 5):
        g = read_dag(out / f"synth_{i}.graph")
        assert g.nodes == gold.nodes
    manifest = read_manifest(out)
    assert manifest["command"] == "synth"
    assert manifest["config"] == {
        "graphs": 4,
        "nodes": 6,
        "prefix": "synth",
        "seed": 9,
    }
    assert manifest["inputs"] == []
    assert manifest["outputs"] == [
        "synth_1.graph",
        "synth_2.graph",
        "synth_3.graph",
        "synth_4.graph",
        "synth_gold.graph",
    ]


def test_synth_same_seed_is_byte_identical(tmp_path):
    args = ["synth", "-n", "8", "-r", "3", "--seed", "21"]
    main([*args, "-o", str(tmp_path / "a")])
    main([*args, "-o", str(tmp_path / "b")])
    for name in ("synth_gold.graph", "synth_1.graph", "synth_3.graph"):
        first = (tmp_path / "a" / name).read_bytes()
        second = (tmp_path / "b" / name).read_bytes()
        assert first == second


def test_synth_prefix_renames_outputs(tmp_path):
    out = tmp_path / "data"
    main(["synth", "-n", "4", "-r", "1", "--seed", "1", "--prefix", "bench", "-o", str(out)])
    names = sorted(p.name for p in out.iterdir())
    assert names == ["bench_1.graph", "bench_gold.graph", "manifest.json"]


def test_fuse_matches_library_output(worked, tmp_path, capsys):
    paths, sigma_path = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "fused"
    assert main(["fuse", *paths, "--ordering", sigma_path, "-o", str(out)]) == 0
    capsys.readouterr()

    graphs = tuple(read_dag(p) for p in paths)
    sigma = read_ordering(sigma_path, graphs[0].nodes)
    result = fuse(FusionInput(graphs, ordering_override=sigma))
    assert (out / "fused.graph").read_text() == format_graph(result.fused)
    assert (out / "sigma.txt").read_text() == "".join(
        f"{label}\n" for label in result.ordering.labels
    )
    manifest = read_manifest(out)
    assert manifest["command"] == "fuse"
    assert manifest["outputs"] == ["fused.graph", "sigma.txt"]
    assert manifest["inputs"] == paths


def test_fuse_default_ordering_uses_heuristic(worked, tmp_path):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "fused"
    main(["fuse", *paths, "-o", str(out)])
    graphs = tuple(read_dag(p) for p in paths)
    result = fuse(FusionInput(graphs))
    assert (out / "fused.graph").read_text() == format_graph(result.fused)


def test_consensus_theta_run_outputs(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "run"
    assert main(["consensus", *paths, "--theta", "1/2", "-o", str(out)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "consensus.cpdag",
        "consensus.graph",
        "manifest.json",
        "metrics.csv",
        "trajectory.json",
    ]

    graphs = tuple(read_dag(p) for p in paths)
    expected = run(FusionInput(graphs), Config(theta="1/2"))
    assert read_dag(out / "consensus.graph") == expected.consensus
    assert read_pdag(out / "consensus.cpdag") == expected.cpdag
    assert load_trajectory(out / "trajectory.json") == expected.trajectory
    rows = trajectory_metrics_rows(expected.trajectory, graphs)
    assert (out / "metrics.csv").read_text() == format_metrics_csv(rows, False)

    manifest = read_manifest(out)
    assert manifest["command"] == "consensus"
    assert manifest["config"]["theta"] == "1/2"
    assert manifest["config"]["kmax"] == 10
    assert manifest["config"]["trajectory"] is False
    assert manifest["outputs"] == [
        "consensus.cpdag",
        "consensus.graph",
        "metrics.csv",
        "trajectory.json",
    ]


def test_consensus_worked_golden_shape(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "run"
    main(["consensus", *paths, "--theta", "0.5", "-o", str(out)])
    capsys.readouterr()
    cpdag = read_pdag(out / "consensus.cpdag")
    assert cpdag.directed_edges == ()
    assert cpdag.undirected_edges == (
        ("w", "x"),
        ("w", "y"),
        ("x", "y"),
        ("x", "z"),
    )
    consensus = read_dag(out / "consensus.graph")
    assert dag_to_cpdag(consensus) == cpdag
    trajectory = load_trajectory(out / "trajectory.json")
    assert [(s.u, s.v) for s in trajectory.steps] == [("y", "z")]


def test_consensus_theta_zero_keeps_union_pattern(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "run"
    main(["consensus", *paths, "--theta", "0", "-o", str(out)])
    capsys.readouterr()
    graphs = tuple(read_dag(p) for p in paths)
    union_pattern = dag_to_cpdag(fuse(FusionInput(graphs)).fused)
    assert read_pdag(out / "consensus.cpdag") == union_pattern
    assert read_dag(out / "consensus.graph") == pdag_to_dag(union_pattern)
    assert load_trajectory(out / "trajectory.json").steps == ()


def test_consensus_trajectory_mode_runs_to_empty(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "run"
    assert main(["consensus", *paths, "--trajectory", "-o", str(out)]) == 0
    capsys.readouterr()
    trajectory = load_trajectory(out / "trajectory.json")
    assert len(trajectory.steps) == 5
    assert trajectory.steps[-1].skeleton_edges == 0
    assert read_dag(out / "consensus.graph").edges == ()
    manifest = read_manifest(out)
    assert manifest["config"]["theta"] is None
    assert manifest["config"]["trajectory"] is True


def test_consensus_gold_adds_metrics_column(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    gold_path = tmp_path / "gold.graph"
    write_graph(read_dag(paths[0]), gold_path)
    out = tmp_path / "run"
    main([
        "consensus", *paths,
        "--trajectory", "--gold", str(gold_path), "-o", str(out),
    ])
    capsys.readouterr()
    header = (out / "metrics.csv").read_text().splitlines()[0]
    assert header.endswith(",smhd_to_gold")
    graphs = tuple(read_dag(p) for p in paths)
    expected = run(FusionInput(graphs))
    rows = trajectory_metrics_rows(
        expected.trajectory, graphs, gold=read_dag(gold_path)
    )
    assert (out / "metrics.csv").read_text() == format_metrics_csv(rows, True)


def test_consensus_kmax_recorded_and_applied(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "run"
    main(["consensus", *paths, "--trajectory", "--kmax", "3", "-o", str(out)])
    capsys.readouterr()
    manifest = read_manifest(out)
    assert manifest["config"]["kmax"] == 3
    graphs = tuple(read_dag(p) for p in paths)
    expected = run(FusionInput(graphs), Config(k_max=3))
    assert load_trajectory(out / "trajectory.json") == expected.trajectory


def test_consensus_reruns_are_byte_identical(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    main(["consensus", *paths, "--trajectory", "-o", str(tmp_path / "a")])
    main(["consensus", *paths, "--trajectory", "-o", str(tmp_path / "b")])
    capsys.readouterr()
    for name in ("trajectory.json", "metrics.csv", "consensus.graph"):
        assert (tmp_path / "a" / name).read_bytes() == (
            tmp_path / "b" / name
        ).read_bytes()


def test_select_theta_writes_selected_pattern(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    run_dir = tmp_path / "run"
    main(["consensus", *paths, "--trajectory", "-o", str(run_dir)])
    sel_dir = tmp_path / "sel"
    traj_path = str(run_dir / "trajectory.json")
    assert main(["select-theta", traj_path, *paths, "-o", str(sel_dir)]) == 0
    out_text = capsys.readouterr().out

    graphs = tuple(read_dag(p) for p in paths)
    trajectory = load_trajectory(traj_path)
    selection = select_theta(trajectory, graphs)
    pattern = prefix_state(trajectory, selection.prefix)
    assert pattern == selection.pattern
    assert (sel_dir / "selected.cpdag").read_text() == format_graph(pattern)
    assert f"prefix: {selection.prefix} of" in out_text
    assert "theta*: 1/3" in out_text
    manifest = read_manifest(sel_dir)
    assert manifest["command"] == "select-theta"
    assert manifest["outputs"] == ["selected.cpdag"]
    assert manifest["inputs"][0] == traj_path


def test_select_theta_degenerate_prefix_zero(tmp_path, capsys):
    # a single chain input agrees with its own union, so nothing is cut
    text = "nodes: a,b,c\na -> b\nb -> c\n"
    path = tmp_path / "chain.graph"
    path.write_text(text)
    run_dir = tmp_path / "run"
    main(["consensus", str(path), "--trajectory", "-o", str(run_dir)])
    sel_dir = tmp_path / "sel"
    main([
        "select-theta", str(run_dir / "trajectory.json"), str(path),
        "-o", str(sel_dir),
    ])
    out_text = capsys.readouterr().out
    assert "theta*: 0" in out_text
    assert "prefix: 0 of" in out_text
    g = read_dag(path)
    assert (sel_dir / "selected.cpdag").read_text() == format_graph(
        dag_to_cpdag(g)
    )


def test_metrics_stdout_csv(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    assert main(["metrics", paths[0], paths[0]]) == 0
    out_text = capsys.readouterr().out
    lines = out_text.splitlines()
    assert lines[0] == "graph,edges,treewidth_ub,smhd_to_ref"
    assert lines[1] == f"{paths[0]},3,1,0"
    assert lines[2] == "mean,,,0.0"


def test_metrics_against_empty_graph(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    empty_path = tmp_path / "empty.graph"
    empty_path.write_text("nodes: w,x,y,z\n")
    main(["metrics", paths[0], str(empty_path)])
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == f"{empty_path},0,0,3"


def test_metrics_batch_rows_match_library(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    gold_path = tmp_path / "gold.graph"
    write_graph(read_dag(paths[2]), gold_path)
    main(["metrics", str(gold_path), *paths])
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    gold = read_dag(gold_path)
    graphs = [read_dag(p) for p in paths]
    for line, path, g in zip(lines[1:4], paths, graphs):
        assert line.split(",")[0] == path
        assert line.split(",")[3] == str(smhd(gold, g))
    assert lines[4] == f"mean,,,{float(mean_smhd(gold, graphs))!r}"


def test_metrics_accepts_pattern_files(worked, tmp_path, capsys):
    _, (g1, _, _), _ = worked
    paths, _ = write_worked_inputs(worked, tmp_path)
    pattern = dag_to_cpdag(g1)
    pattern_path = tmp_path / "first.cpdag"
    write_graph(pattern, pattern_path)
    assert main(["metrics", paths[0], str(pattern_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == f"{pattern_path},3,1,{smhd(g1, pattern)}"


def test_metrics_json_output(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "met"
    assert main([
        "metrics", paths[0], *paths, "--format", "json", "-o", str(out),
    ]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in out.iterdir())
    assert names == ["manifest.json", "metrics.json"]
    with open(out / "metrics.json", "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    assert payload["reference"] == paths[0]
    assert [row["graph"] for row in payload["rows"]] == paths
    assert payload["rows"][0]["smhd_to_ref"] == 0
    gold = read_dag(paths[0])
    graphs = [read_dag(p) for p in paths]
    assert payload["mean_smhd"] == float(mean_smhd(gold, graphs))


def test_metrics_csv_file_output(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    out = tmp_path / "met"
    main(["metrics", paths[0], *paths, "-o", str(out)])
    stdout_run = main(["metrics", paths[0], *paths])
    assert stdout_run == 0
    out_text = capsys.readouterr().out
    written = (out / "metrics.csv").read_text()
    assert out_text.endswith(written) or written in out_text


def test_report_renders_one_png_per_metric(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    run_dir = tmp_path / "run"
    main([
        "consensus", *paths,
        "--trajectory", "--gold", paths[0], "-o", str(run_dir),
    ])
    figs = tmp_path / "figs"
    assert main(["report", str(run_dir / "metrics.csv"), "-o", str(figs)]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in figs.iterdir())
    assert names == [
        "metrics_edges.png",
        "metrics_mean_smhd_to_inputs.png",
        "metrics_smhd_to_gold.png",
        "metrics_treewidth_ub.png",
        "report_manifest.json",
    ]
    for name in names[:-1]:
        assert (figs / name).read_bytes()[:8] == PNG_MAGIC
    manifest_path = figs / "report_manifest.json"
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    assert manifest["command"] == "report"
    assert manifest["outputs"] == names[:-1]


def test_report_without_gold_skips_missing_column(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    run_dir = tmp_path / "run"
    main(["consensus", *paths, "--trajectory", "-o", str(run_dir)])
    assert main(["report", str(run_dir / "metrics.csv")]) == 0
    capsys.readouterr()
    # default target directory is the one holding the table
    pngs = sorted(p.name for p in run_dir.glob("*.png"))
    assert pngs == [
        "metrics_edges.png",
        "metrics_mean_smhd_to_inputs.png",
        "metrics_treewidth_ub.png",
    ]
    # the run manifest survives next to the figure manifest
    assert (run_dir / "manifest.json").exists()
    assert (run_dir / "report_manifest.json").exists()


def test_node_set_mismatch_fails_cleanly(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    bad = tmp_path / "bad.graph"
    bad.write_text("nodes: a,b\na -> b\n")
    out = tmp_path / "out"
    out.mkdir()
    (out / "keep.txt").write_text("untouched")
    rc = main(["consensus", paths[0], str(bad), "--theta", "0.5", "-o", str(out)])
    err = capsys.readouterr().err
    assert rc == 1
    assert str(bad) in err
    assert "node set differs" in err
    assert sorted(p.name for p in out.iterdir()) == ["keep.txt"]


def test_parse_error_names_file_and_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "broken.graph"
    bad.write_text("nodes: a,b\na => b\n")
    out = tmp_path / "out"
    rc = main(["fuse", str(bad), "-o", str(out)])
    err = capsys.readouterr().err
    assert rc == 1
    assert "broken.graph" in err
    assert not any(out.iterdir())


def test_bad_theta_reports_input_error(worked, tmp_path, capsys):
    paths, _ = write_worked_inputs(worked, tmp_path)
    rc = main([
        "consensus", *paths, "--theta", "abc", "-o", str(tmp_path / "o"),
    ])
    err = capsys.readouterr().err
    assert rc == 1
    assert "cannot read threshold from 'abc'" in err


def test_missing_input_file_reports_errno(tmp_path, capsys):
    rc = main(["fuse", str(tmp_path / "nope.graph"), "-o", str(tmp_path / "o")])
    err = capsys.readouterr().err
    assert rc == 1
    assert "nope.graph" in err


def test_theta_and_trajectory_are_mutually_exclusive(worked, tmp_path):
    paths, _ = write_worked_inputs(worked, tmp_path)
    with pytest.raises(SystemExit) as exc:
        main([
            "consensus", *paths, "--theta", "0.5", "--trajectory",
            "-o", str(tmp_path / "o"),
        ])
    assert exc.value.code == 2
