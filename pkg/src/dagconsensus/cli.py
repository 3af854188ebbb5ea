"""Command line front end.

Commands write their artifacts into a target directory together with a
``manifest.json`` recording the command, package version, inputs and
configuration.  A command exits 0 only when every artifact was written; on
failure, files written so far are removed, so a manifest's presence implies
a complete output set.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .consensus import Config, run, select_theta
from .errors import InputError, OperatorError, StateError, StructuralError
from .fusion import FusionInput, fuse
from .metrics import compare
from .serialize import (
    dumps_canonical_json,
    load_trajectory,
    format_metrics_csv,
    trajectory_metrics_rows,
    trajectory_to_dict,
)
from .synthetic import GenConstraints, perturb, random_dag
from .textio import (
    format_graph,
    format_ordering,
    read_dag,
    read_dags,
    read_ordering,
    read_pdag,
    read_pdags,
)


@dataclass(frozen=True)
class RunManifest:
    """What a command ran with and what it produced."""

    command: str
    version: str
    inputs: tuple[str, ...]
    config: dict
    outputs: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "inputs": list(self.inputs),
            "config": self.config,
            "outputs": list(self.outputs),
        }


def _emit(written: list[Path], path: Path, content: str) -> None:
    written.append(path)
    path.write_text(content, encoding="utf-8")


def _finish(
    written: list[Path],
    out_dir: Path,
    command: str,
    inputs: tuple[str, ...],
    config: dict,
    manifest_name: str = "manifest.json",
) -> None:
    manifest = RunManifest(
        command=command,
        version=__version__,
        inputs=inputs,
        config=config,
        outputs=tuple(sorted(p.name for p in written)),
    )
    _emit(written, out_dir / manifest_name, dumps_canonical_json(manifest.to_dict()))
    for path in written:
        print(f"wrote {path}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_synth(args, written: list[Path]) -> int:
    if args.nodes < 2:
        raise InputError("need at least two nodes")
    if args.graphs < 1:
        raise InputError("need at least one variant")
    out = _out_dir(args)
    constraints = GenConstraints()
    gold = random_dag(args.nodes, constraints, seed=args.seed)
    _emit(written, out / f"{args.prefix}_gold.graph", format_graph(gold))
    for i in range(1, args.graphs + 1):
        variant = perturb(gold, constraints, seed=args.seed ^ i)
        _emit(written, out / f"{args.prefix}_{i}.graph", format_graph(variant))
    _finish(
        written,
        out,
        "synth",
        inputs=(),
        config={
            "nodes": args.nodes,
            "graphs": args.graphs,
            "seed": args.seed,
            "prefix": args.prefix,
        },
    )
    return 0


def _fusion_input(args) -> FusionInput:
    graphs = read_dags(args.inputs)
    override = None
    if args.ordering:
        override = read_ordering(args.ordering, graphs[0].nodes)
    return FusionInput(graphs=tuple(graphs), ordering_override=override)


def cmd_fuse(args, written: list[Path]) -> int:
    out = _out_dir(args)
    result = fuse(_fusion_input(args))
    _emit(written, out / "fused.graph", format_graph(result.fused))
    _emit(written, out / "sigma.txt", format_ordering(result.ordering))
    _finish(
        written,
        out,
        "fuse",
        inputs=tuple(args.inputs),
        config={"ordering": args.ordering},
    )
    return 0


def cmd_consensus(args, written: list[Path]) -> int:
    out = _out_dir(args)
    fusion_input = _fusion_input(args)
    config = Config(theta=None if args.trajectory else args.theta, k_max=args.kmax)
    result = run(fusion_input, config)
    gold = read_dag(args.gold) if args.gold else None
    if gold is not None and gold.nodes != fusion_input.nodes:
        raise InputError("reference graph must share the inputs' node set")
    rows = trajectory_metrics_rows(result.trajectory, fusion_input.graphs, gold)
    _emit(written, out / "consensus.graph", format_graph(result.consensus))
    _emit(written, out / "consensus.cpdag", format_graph(result.cpdag))
    _emit(
        written,
        out / "trajectory.json",
        dumps_canonical_json(trajectory_to_dict(result.trajectory, config)),
    )
    _emit(
        written,
        out / "metrics.csv",
        format_metrics_csv(rows, with_gold=gold is not None),
    )
    _finish(
        written,
        out,
        "consensus",
        inputs=tuple(args.inputs),
        config={
            "theta": args.theta,
            "trajectory": args.trajectory,
            "kmax": args.kmax,
            "ordering": args.ordering,
            "gold": args.gold,
        },
    )
    print(f"steps: {len(result.trajectory.steps)}")
    print(f"final skeleton edges: {result.cpdag.skeleton_edge_count}")
    return 0


def cmd_select_theta(args, written: list[Path]) -> int:
    out = _out_dir(args)
    trajectory = load_trajectory(args.trajectory)
    graphs = read_dags(args.inputs)
    selection = select_theta(trajectory, graphs)
    _emit(written, out / "selected.cpdag", format_graph(selection.pattern))
    _finish(
        written,
        out,
        "select-theta",
        inputs=(args.trajectory, *args.inputs),
        config={},
    )
    print(f"theta*: {selection.theta} ({float(selection.theta):.6g})")
    print(f"prefix: {selection.prefix} of {len(trajectory.steps)} steps")
    print(f"mean distance to inputs: {float(selection.mean_distance):.6g}")
    return 0


def cmd_metrics(args, written: list[Path]) -> int:
    # patterns are welcome here; a plain DAG file parses as an all-directed one
    reference = read_pdag(args.reference)
    others = read_pdags(args.inputs)
    if others[0].nodes != reference.nodes:
        raise InputError("all graphs must share the reference's node set")
    reports = [
        compare(args.reference, reference, path, g)
        for path, g in zip(args.inputs, others)
    ]
    mean = sum(rep.smhd for rep in reports) / len(reports)
    if args.format == "json":
        payload = {
            "reference": args.reference,
            "rows": [
                {
                    "graph": rep.name_b,
                    "edges": rep.edges_b,
                    "treewidth_ub": rep.treewidth_ub_b,
                    "smhd_to_ref": rep.smhd,
                }
                for rep in reports
            ],
            "mean_smhd": mean,
        }
        text = dumps_canonical_json(payload)
    else:
        lines = ["graph,edges,treewidth_ub,smhd_to_ref"]
        lines.extend(
            f"{rep.name_b},{rep.edges_b},{rep.treewidth_ub_b},{rep.smhd}"
            for rep in reports
        )
        lines.append(f"mean,,,{mean!r}")
        text = "\n".join(lines) + "\n"
    if args.out:
        out = _out_dir(args)
        name = "metrics.json" if args.format == "json" else "metrics.csv"
        _emit(written, out / name, text)
        _finish(
            written,
            out,
            "metrics",
            inputs=(args.reference, *args.inputs),
            config={"format": args.format},
        )
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args, written: list[Path]) -> int:
    from .report import render_metric_figures

    out_dir = args.out if args.out else None
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    figures = render_metric_figures(args.table, out_dir)
    written.extend(figures)
    target = Path(out_dir) if out_dir else Path(args.table).parent
    manifest = RunManifest(
        command="report",
        version=__version__,
        inputs=(args.table,),
        config={},
        outputs=tuple(sorted(p.name for p in figures)),
    )
    _emit(
        written,
        target / "report_manifest.json",
        dumps_canonical_json(manifest.to_dict()),
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagconsensus",
        description="Fuse Bayesian-network DAGs and prune the union to a consensus.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a seeded ground truth plus noisy variants")
    synth.add_argument("-n", "--nodes", type=int, required=True, help="node count")
    synth.add_argument("-r", "--graphs", type=int, required=True, help="variant count")
    synth.add_argument("--seed", type=int, default=0, help="generator seed")
    synth.add_argument("--prefix", default="synth", help="output file prefix")
    synth.add_argument("-o", "--out", required=True, help="output directory")
    synth.set_defaults(func=cmd_synth)

    fuse_p = sub.add_parser("fuse", help="align inputs to one ordering and take the union")
    fuse_p.add_argument("inputs", nargs="+", help="input DAG files")
    fuse_p.add_argument("--ordering", help="node ordering override file")
    fuse_p.add_argument("-o", "--out", required=True, help="output directory")
    fuse_p.set_defaults(func=cmd_fuse)

    cons = sub.add_parser("consensus", help="run the full fuse-and-prune pipeline")
    cons.add_argument("inputs", nargs="+", help="input DAG files")
    mode = cons.add_mutually_exclusive_group(required=True)
    mode.add_argument("--theta", help="pruning threshold, e.g. 0.5 or 1/3")
    mode.add_argument(
        "--trajectory",
        action="store_true",
        help="prune every edge and record the full trajectory",
    )
    cons.add_argument("--kmax", type=int, default=10, help="max steering set size")
    cons.add_argument("--ordering", help="node ordering override file")
    cons.add_argument("--gold", help="reference DAG for the metrics table")
    cons.add_argument("-o", "--out", required=True, help="output directory")
    cons.set_defaults(func=cmd_consensus)

    sel = sub.add_parser("select-theta", help="pick the trajectory prefix closest to the inputs")
    sel.add_argument("trajectory", help="trajectory.json from a trajectory-mode run")
    sel.add_argument("inputs", nargs="+", help="the original input DAG files")
    sel.add_argument("-o", "--out", required=True, help="output directory")
    sel.set_defaults(func=cmd_select_theta)

    met = sub.add_parser("metrics", help="compare graphs against a reference")
    met.add_argument("reference", help="reference graph file")
    met.add_argument("inputs", nargs="+", help="graphs to compare")
    met.add_argument("--format", choices=("csv", "json"), default="csv")
    met.add_argument("-o", "--out", help="optional output directory")
    met.set_defaults(func=cmd_metrics)

    rep = sub.add_parser("report", help="render metric curves from a metrics CSV")
    rep.add_argument("table", help="metrics.csv produced by the consensus command")
    rep.add_argument("-o", "--out", help="directory for figures (default: next to the CSV)")
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    written: list[Path] = []
    try:
        return args.func(args, written)
    except (InputError, OperatorError, StateError, StructuralError, OSError, ValueError) as exc:
        for path in reversed(written):
            try:
                path.unlink()
            except OSError:
                pass
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
