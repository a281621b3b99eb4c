"""Turn harness CSV output into line figures.

The input contract is the harness schema
``axis_value,scheme,seed,min_sinr_linear,min_sinr_db,iterations,wall_ms``;
aggregation (mean over seeds, in linear scale) is always recomputed here from
the raw rows, never read from pre-aggregated files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("axis_value", "scheme", "seed", "min_sinr_linear")

KINDS = ("convergence", "sweep")

AXIS_LABELS = {
    "convergence": "iteration",
    "sweep": "axis value",
}


class PlotInputError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    kind: str                      # convergence | sweep
    out_path: str
    db: bool = False
    x_column: str = "axis_value"
    group_column: str = "scheme"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotInputError(f"unknown figure kind '{self.kind}'")


def read_rows(csv_path, x_column="axis_value", group_column="scheme"):
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in set(REQUIRED_COLUMNS) | {x_column, group_column}:
            if col not in header:
                raise PlotInputError(f"{csv_path}: missing column '{col}'")
        rows = list(reader)
    if not rows:
        raise PlotInputError(f"{csv_path}: no data rows")
    return rows


def compute_series(csv_path, kind="sweep", db=False,
                   x_column="axis_value", group_column="scheme"):
    """Mean-over-seeds line per scheme: {scheme: (x array, y array)}.

    Means are taken in linear scale and converted to dB afterwards when
    requested, matching the harness aggregation convention.
    """
    rows = read_rows(csv_path, x_column, group_column)
    table: dict[str, dict[float, list[float]]] = {}
    for row in rows:
        scheme = row[group_column]
        x = float(row[x_column])
        y = float(row["min_sinr_linear"])
        table.setdefault(scheme, {}).setdefault(x, []).append(y)
    series = {}
    for scheme in sorted(table):
        xs = np.array(sorted(table[scheme]))
        ys = np.array([np.mean(table[scheme][x]) for x in xs])
        if db:
            ys = 10 * np.log10(np.maximum(ys, 1e-300))
        series[scheme] = (xs, ys)
    return series


def render(spec: PlotSpec) -> str:
    """Write the figure; returns the output path."""
    series = compute_series(spec.csv_path, spec.kind, spec.db,
                            spec.x_column, spec.group_column)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for scheme, (xs, ys) in series.items():
        ax.plot(xs, ys, marker="o", markersize=4, label=scheme)
    ax.set_xlabel(AXIS_LABELS.get(spec.kind, spec.x_column))
    ax.set_ylabel("min SINR (dB)" if spec.db else "min SINR (linear)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return str(out)
