"""Canonical serialization of trajectories, metrics tables and manifests.

Every writer here is deterministic: keys are sorted, rationals are written
as exact ``p/q`` strings (plus a convenience float), and nothing records
timestamps or environment details, so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction
from typing import Sequence

from .consensus import Config, PruneStep, Trajectory, prefix_states
from .equivalence import Pdag, pdag_to_dag
from .errors import InputError
from .graphs import Dag, NodeSet, Ordering
from .metrics import smhd, treewidth_upper

TRAJECTORY_FORMAT = "trajectory/1"

METRICS_COLUMNS = ("step", "psi_star", "edges", "treewidth_ub", "mean_smhd_to_inputs")
METRICS_GOLD_COLUMN = "smhd_to_gold"


def dumps_canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fraction_str(value: Fraction) -> str:
    return str(value)


def _pairs(edges) -> list[list[str]]:
    return [list(pair) for pair in sorted(edges)]


def trajectory_to_dict(trajectory: Trajectory, config: Config | None = None) -> dict:
    steps = []
    for step in trajectory.steps:
        steps.append(
            {
                "index": step.index,
                "edge": [step.u, step.v],
                "directed": step.directed,
                "h_set": list(step.h_set),
                "s_set": list(step.s_set),
                "psi": _fraction_str(step.psi_star),
                "psi_float": float(step.psi_star),
                "per_graph_cuts": [_pairs(cut) for cut in step.per_graph_cuts],
                "skeleton_edges": step.skeleton_edges,
                "treewidth_ub": step.treewidth_ub,
                "input_edge_counts": list(step.input_edge_counts),
            }
        )
    payload = {
        "format": TRAJECTORY_FORMAT,
        "nodes": list(trajectory.g_plus.nodes.labels),
        "sigma": list(trajectory.sigma.labels),
        "g_plus": {"edges": _pairs(trajectory.g_plus.edges)},
        "steps": steps,
        "final_state": {
            "directed": _pairs(trajectory.final_state.directed_edges),
            "undirected": _pairs(trajectory.final_state.undirected_edges),
        },
    }
    if config is not None:
        payload["config"] = {
            "theta": None if config.theta is None else _fraction_str(config.theta),
            "k_max": config.k_max,
        }
    return payload


def trajectory_from_dict(payload: dict) -> Trajectory:
    if payload.get("format") != TRAJECTORY_FORMAT:
        raise InputError(
            f"unsupported trajectory format: {payload.get('format')!r}"
        )
    nodes = NodeSet(payload["nodes"])
    sigma = Ordering(nodes, payload["sigma"])
    g_plus = Dag(nodes, [tuple(e) for e in payload["g_plus"]["edges"]])
    steps = []
    for raw in payload["steps"]:
        steps.append(
            PruneStep(
                index=raw["index"],
                u=raw["edge"][0],
                v=raw["edge"][1],
                directed=raw["directed"],
                h_set=tuple(raw["h_set"]),
                s_set=tuple(raw["s_set"]),
                psi_star=Fraction(raw["psi"]),
                per_graph_cuts=tuple(
                    frozenset(tuple(pair) for pair in cut)
                    for cut in raw["per_graph_cuts"]
                ),
                skeleton_edges=raw["skeleton_edges"],
                treewidth_ub=raw["treewidth_ub"],
                input_edge_counts=tuple(raw["input_edge_counts"]),
            )
        )
    final = payload["final_state"]
    final_state = Pdag(
        nodes,
        [tuple(e) for e in final["directed"]],
        [tuple(e) for e in final["undirected"]],
    )
    return Trajectory(
        sigma=sigma, g_plus=g_plus, steps=tuple(steps), final_state=final_state
    )


def dump_trajectory(
    trajectory: Trajectory, path: str | os.PathLike, config: Config | None = None
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical_json(trajectory_to_dict(trajectory, config)))


def load_trajectory(path: str | os.PathLike) -> Trajectory:
    with open(path, "r", encoding="utf-8") as fh:
        return trajectory_from_dict(json.load(fh))


def trajectory_metrics_rows(
    trajectory: Trajectory,
    inputs: Sequence[Dag],
    gold: Dag | None = None,
) -> list[dict]:
    """One row per trajectory prefix with the frozen metrics columns.

    ``psi_star`` for prefix t is the score of step t (0 for the empty
    prefix), ``edges`` the skeleton size of the prefix pattern, and the
    distance columns compare the prefix's member DAG to the inputs and,
    when given, the reference graph.
    """
    rows = []
    r = len(inputs)
    for prefix, pattern in prefix_states(trajectory):
        member = pdag_to_dag(pattern)
        psi = Fraction(0) if prefix == 0 else trajectory.steps[prefix - 1].psi_star
        row = {
            "step": prefix,
            "psi_star": float(psi),
            "edges": pattern.skeleton_edge_count,
            "treewidth_ub": treewidth_upper(pattern),
            "mean_smhd_to_inputs": float(
                Fraction(sum(smhd(member, g) for g in inputs), r)
            ),
        }
        if gold is not None:
            row[METRICS_GOLD_COLUMN] = smhd(member, gold)
        rows.append(row)
    return rows


def format_metrics_csv(rows: Sequence[dict], with_gold: bool) -> str:
    columns = METRICS_COLUMNS + ((METRICS_GOLD_COLUMN,) if with_gold else ())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({col: _csv_cell(row[col]) for col in columns})
    return buf.getvalue()


def write_metrics_csv(rows: Sequence[dict], path: str | os.PathLike, with_gold: bool) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_metrics_csv(rows, with_gold))


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
