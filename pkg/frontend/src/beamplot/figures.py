"""Line charts from beamforming sweep result files.

Input is the sweep results CSV (one row per beamformer, grid point, and run).
Statistics are recomputed here from the raw rows rather than read from any
pre-aggregated file, so the two reporting paths can cross-check each other.
Rendering is deliberately deterministic: fixed style, fixed size, no
timestamps or volatile metadata, so identical input yields identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

RESULT_COLUMNS = (
    "example_id", "beamformer", "snr_db", "snapshots", "run_index",
    "output_sinr_db", "output_power_db", "certificate", "branch",
    "sdp_value", "solve_ms",
)

X_AXES = ("snr_db", "snapshots")
Y_AXES = ("output_sinr_db", "output_power_db")

BEAMFORMER_LABELS = {
    "kvh": "KVH Beamformer",
    "new1": "New Beamformer 1",
    "new2": "New Beamformer 2",
    "new3": "New Beamformer 3",
    "new4": "New Beamformer 4",
}

AXIS_LABELS = {
    "snr_db": "SNR (dB)",
    "snapshots": "Training sample size T",
    "output_sinr_db": "Average output SINR (dB)",
    "output_power_db": "Average output power (dB)",
}

# fixed per-beamformer style so rerenders and subsets stay comparable
_STYLES = {
    "kvh": dict(color="#555555", marker="s", linestyle="--"),
    "new1": dict(color="#1f77b4", marker="o", linestyle="-"),
    "new2": dict(color="#d62728", marker="^", linestyle="-"),
    "new3": dict(color="#2ca02c", marker="v", linestyle="-"),
    "new4": dict(color="#9467bd", marker="d", linestyle="-"),
}


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: which axes, which input file, where to write the image."""

    input_path: str
    output_path: str
    x_axis: str = "snr_db"
    y_axis: str = "output_sinr_db"
    labels: dict = field(default_factory=lambda: dict(BEAMFORMER_LABELS))
    error_bands: bool = False

    def __post_init__(self):
        if self.x_axis not in X_AXES:
            raise ValueError(f"x_axis must be one of {X_AXES}")
        if self.y_axis not in Y_AXES:
            raise ValueError(f"y_axis must be one of {Y_AXES}")


def read_rows(path: str | Path) -> list[dict]:
    """Parse a results CSV, keeping failed solves out of the statistics."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_COLUMNS:
            raise ValueError(f"{path}: header does not match the results schema")
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(RESULT_COLUMNS):
                raise ValueError(f"{path}:{lineno}: expected {len(RESULT_COLUMNS)} columns")
            row = dict(zip(RESULT_COLUMNS, record))
            try:
                row["snr_db"] = float(row["snr_db"])
                row["snapshots"] = int(row["snapshots"])
                row["output_sinr_db"] = float(row["output_sinr_db"])
                row["output_power_db"] = float(row["output_power_db"])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def aggregate(rows: list[dict], x_axis: str, y_axis: str):
    """Mean and population std of ``y_axis`` per (beamformer, x value).

    Returns {beamformer: (x values, means, stds)} with x sorted ascending.
    Failed rows and non-finite values are excluded.
    """
    groups: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        if row["certificate"] == "failed" or not np.isfinite(row[y_axis]):
            continue
        groups.setdefault((row["beamformer"], row[x_axis]), []).append(row[y_axis])
    curves: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    beamformers = sorted({bf for bf, _ in groups})
    for bf in beamformers:
        xs = np.array(sorted(x for b, x in groups if b == bf))
        means = np.array([np.mean(groups[(bf, x)]) for x in xs])
        stds = np.array([np.std(groups[(bf, x)]) for x in xs])
        curves[bf] = (xs, means, stds)
    return curves


def render(spec: FigureSpec) -> str:
    """Draw one mean-per-beamformer line chart and write the image file."""
    rows = read_rows(spec.input_path)
    curves = aggregate(rows, spec.x_axis, spec.y_axis)
    if not curves:
        raise ValueError("no beamformers selected; nothing to draw")

    fig, ax = plt.subplots(figsize=(7.0, 5.0), dpi=120)
    for bf, (xs, means, stds) in curves.items():
        style = _STYLES.get(bf, {})
        label = spec.labels.get(bf, bf)
        ax.plot(xs, means, label=label, markersize=4.5, linewidth=1.4, **style)
        if spec.error_bands:
            color = style.get("color")
            ax.fill_between(xs, means - stds, means + stds, alpha=0.15, color=color)
    ax.set_xlabel(AXIS_LABELS[spec.x_axis])
    ax.set_ylabel(AXIS_LABELS[spec.y_axis])
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    # strip volatile metadata so identical input gives identical bytes
    fig.savefig(spec.output_path, metadata={"Software": None})
    plt.close(fig)
    return spec.output_path
