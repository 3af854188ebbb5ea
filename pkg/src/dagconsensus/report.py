"""Figure rendering for trajectory metrics tables.

Renders one PNG per metric, plotting the column against the pruning
threshold, next to the CSV they came from.  Import is kept out of the core
pipeline so headless runs without figure output never touch matplotlib.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import InputError

_CURVES = (
    ("mean_smhd_to_inputs", "mean moral Hamming distance to inputs"),
    ("smhd_to_gold", "moral Hamming distance to reference"),
    ("edges", "skeleton edges"),
    ("treewidth_ub", "treewidth upper bound"),
)


def read_metrics_table(path: str | os.PathLike) -> list[dict[str, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = [
            {key: float(value) for key, value in row.items()} for row in reader
        ]
    if not rows:
        raise InputError(f"{path}: empty metrics table")
    return rows


def render_metric_figures(
    csv_path: str | os.PathLike, out_dir: str | os.PathLike | None = None
) -> list[Path]:
    """Write one PNG per available metric column; returns the paths."""
    csv_path = Path(csv_path)
    target = Path(out_dir) if out_dir is not None else csv_path.parent
    rows = read_metrics_table(csv_path)
    thresholds = [row["psi_star"] for row in rows]
    written: list[Path] = []
    for column, label in _CURVES:
        if column not in rows[0]:
            continue
        values = [row[column] for row in rows]
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        ax.plot(thresholds, values, marker="o", markersize=3, linewidth=1.2)
        ax.set_xlabel("threshold")
        ax.set_ylabel(label)
        ax.set_title(f"{label} along the pruning trajectory")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = target / f"{csv_path.stem}_{column}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
