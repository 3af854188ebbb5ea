"""Trajectory JSON and the frozen metrics CSV."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from dagconsensus import Config, FusionInput, InputError, run
from dagconsensus.serialize import (
    METRICS_COLUMNS,
    METRICS_GOLD_COLUMN,
    TRAJECTORY_FORMAT,
    dump_trajectory,
    dumps_canonical_json,
    format_metrics_csv,
    load_trajectory,
    trajectory_from_dict,
    trajectory_metrics_rows,
    trajectory_to_dict,
    write_metrics_csv,
)


def full_trajectory(worked):
    _, graphs, sigma = worked
    return run(FusionInput(graphs, sigma)).trajectory


def test_dict_round_trip(worked):
    traj = full_trajectory(worked)
    payload = trajectory_to_dict(traj, Config(theta="1/2"))
    assert payload["format"] == TRAJECTORY_FORMAT
    assert payload["config"] == {"theta": "1/2", "k_max": 10}
    assert trajectory_from_dict(payload) == traj


def test_psi_serialized_exactly(worked):
    traj = full_trajectory(worked)
    payload = trajectory_to_dict(traj)
    first = payload["steps"][0]
    assert first["psi"] == "1/3"
    assert first["psi_float"] == pytest.approx(1 / 3)
    back = trajectory_from_dict(payload)
    assert back.steps[0].psi_star == Fraction(1, 3)


def test_format_field_is_checked(worked):
    payload = trajectory_to_dict(full_trajectory(worked))
    payload["format"] = "trajectory/999"
    with pytest.raises(InputError, match="format"):
        trajectory_from_dict(payload)


def test_canonical_json_is_stable(worked):
    payload = trajectory_to_dict(full_trajectory(worked))
    text = dumps_canonical_json(payload)
    assert text == dumps_canonical_json(json.loads(text))
    assert text.endswith("\n")
    keys = list(json.loads(text).keys())
    assert keys == sorted(keys)


def test_file_round_trip_is_byte_identical(tmp_path, worked):
    traj = full_trajectory(worked)
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    dump_trajectory(traj, a, Config())
    dump_trajectory(load_trajectory(a), b, Config())
    assert a.read_bytes() == b.read_bytes()


def test_metrics_rows_golden(worked):
    _, graphs, _ = worked
    traj = full_trajectory(worked)
    rows = trajectory_metrics_rows(traj, graphs, gold=graphs[0])
    assert len(rows) == len(traj.steps) + 1
    assert format_metrics_csv(rows, with_gold=True) == (
        "step,psi_star,edges,treewidth_ub,mean_smhd_to_inputs,smhd_to_gold\n"
        "0,0.0,5,2,1.6666666666666667,2\n"
        "1,0.3333333333333333,4,2,1.3333333333333333,3\n"
        "2,0.6666666666666666,3,1,1.6666666666666667,2\n"
        "3,0.6666666666666666,2,1,2.0,1\n"
        "4,1.0,1,1,2.3333333333333335,2\n"
        "5,0.6666666666666666,0,0,3.3333333333333335,3\n"
    )


def test_metrics_rows_without_gold(worked):
    _, graphs, _ = worked
    traj = full_trajectory(worked)
    rows = trajectory_metrics_rows(traj, graphs)
    text = format_metrics_csv(rows, with_gold=False)
    header = text.splitlines()[0]
    assert header == ",".join(METRICS_COLUMNS)
    assert METRICS_GOLD_COLUMN not in header
    # prefix 0 is the untouched fusion: five edges, no score yet
    assert text.splitlines()[1].startswith("0,0.0,5,")


def test_write_metrics_csv(tmp_path, worked):
    _, graphs, _ = worked
    traj = full_trajectory(worked)
    rows = trajectory_metrics_rows(traj, graphs)
    out = tmp_path / "m.csv"
    write_metrics_csv(rows, out, with_gold=False)
    assert out.read_text() == format_metrics_csv(rows, with_gold=False)
