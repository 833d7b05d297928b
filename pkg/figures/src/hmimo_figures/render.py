"""Read harness CSV tables and render them as PNG figures.

Expected column subsets per figure kind (extra columns are ignored):

    convergence    solver, iteration, sum_rate
    rate_vs_power  solver, p_tot_dbm, mean_sum_rate
    rate_vs_M      solver, M, mean_sum_rate
    snr_scaling    M, architecture, snr_theory, snr_sim
    sd_nodes       M, variant, nodes_visited

Legend entries come from the grouping column (solver, architecture, or
variant). Rendering is pure: input files are never modified, and the same
inputs produce byte-identical PNG output.
"""
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend pinned first)

KINDS = ("convergence", "rate_vs_power", "rate_vs_M", "snr_scaling",
         "sd_nodes")

_REQUIRED = {
    "convergence": ("solver", "iteration", "sum_rate"),
    "rate_vs_power": ("solver", "p_tot_dbm", "mean_sum_rate"),
    "rate_vs_M": ("solver", "M", "mean_sum_rate"),
    "snr_scaling": ("M", "architecture", "snr_theory", "snr_sim"),
    "sd_nodes": ("M", "variant", "nodes_visited"),
}

# pinned so rebuilt images stay byte-comparable across library versions
_PNG_METADATA = {"Software": "hmimo-figures"}


class SchemaMismatchError(ValueError):
    """An input table lacks columns the requested figure kind needs."""


@dataclass
class PlotSpec:
    kind: str
    csv_paths: List[str]
    out_path: str
    title: str = ""
    dpi: int = 150


def load_table(path, kind: str) -> List[dict]:
    """Rows of one CSV, validated against the kind's required columns."""
    required = _REQUIRED[kind]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        have = list(reader.fieldnames or [])
        missing = [c for c in required if c not in have]
        if missing:
            raise SchemaMismatchError(
                f"{path}: missing columns {missing} for kind '{kind}' "
                f"(found {have})")
        rows = list(reader)
    if not rows:
        raise SchemaMismatchError(f"{path}: no data rows")
    return rows


def _series(rows: List[dict], group_col: str, x_col: str,
            y_col: str) -> Dict[str, Tuple[list, list]]:
    """Per-group (x, y) arrays, x ascending, groups in appearance order."""
    out: Dict[str, Tuple[list, list]] = {}
    for name in dict.fromkeys(r[group_col] for r in rows):
        pts = sorted((float(r[x_col]), float(r[y_col])) for r in rows
                     if r[group_col] == name)
        out[name] = ([p[0] for p in pts], [p[1] for p in pts])
    return out


def _mean_series(rows: List[dict], group_col: str, x_col: str,
                 y_col: str) -> Dict[str, Tuple[list, list]]:
    """Like _series but averaging duplicate x values within a group."""
    out: Dict[str, Tuple[list, list]] = {}
    for name in dict.fromkeys(r[group_col] for r in rows):
        acc: Dict[float, list] = {}
        for r in rows:
            if r[group_col] == name:
                acc.setdefault(float(r[x_col]), []).append(float(r[y_col]))
        xs = sorted(acc)
        out[name] = (xs, [sum(acc[x]) / len(acc[x]) for x in xs])
    return out


def build_figure(spec: PlotSpec):
    """Assemble the (unsaved) matplotlib figure for a plot spec."""
    if spec.kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {spec.kind!r}")
    rows: List[dict] = []
    for path in spec.csv_paths:
        rows.extend(load_table(path, spec.kind))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.kind == "convergence":
        for name, (x, y) in _series(rows, "solver", "iteration",
                                    "sum_rate").items():
            ax.plot(x, y, label=name)
        ax.set_xlabel("BCD round")
        ax.set_ylabel("sum rate [bit/channel use]")
    elif spec.kind == "rate_vs_power":
        for name, (x, y) in _series(rows, "solver", "p_tot_dbm",
                                    "mean_sum_rate").items():
            ax.plot(x, y, marker="o", label=name)
        ax.set_xlabel("total power budget [dBm]")
        ax.set_ylabel("mean sum rate [bit/channel use]")
    elif spec.kind == "rate_vs_M":
        for name, (x, y) in _series(rows, "solver", "M",
                                    "mean_sum_rate").items():
            ax.plot(x, y, marker="s", label=name)
        ax.set_xlabel("metamaterial elements per BS")
        ax.set_ylabel("mean sum rate [bit/channel use]")
    elif spec.kind == "snr_scaling":
        theory = _series(rows, "architecture", "M", "snr_theory")
        sim = _series(rows, "architecture", "M", "snr_sim")
        for name, (x, y) in sim.items():
            line, = ax.plot(x, y, marker="o", label=name)
            tx, ty = theory[name]
            ax.plot(tx, ty, linestyle="--", color=line.get_color())
        ax.set_xlabel("array elements M")
        ax.set_ylabel("receive SNR (markers: simulated; dashed: theory)")
    else:  # sd_nodes
        for name, (x, y) in _mean_series(rows, "variant", "M",
                                         "nodes_visited").items():
            ax.plot(x, y, marker="d", label=name)
        ax.set_yscale("log")  # node counts span orders of magnitude
        ax.set_xlabel("problem size M")
        ax.set_ylabel("mean search-tree nodes")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render_figure(kind: str, csv_paths: Sequence[str], out_path,
                  dpi: int = 150, title: str = "") -> Path:
    """Validate inputs, draw one figure, save it as PNG.

    Nothing is written unless every input table passes validation.
    """
    spec = PlotSpec(kind=kind, csv_paths=[str(p) for p in csv_paths],
                    out_path=str(out_path), title=title, dpi=dpi)
    fig = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=spec.dpi, metadata=dict(_PNG_METADATA))
    finally:
        plt.close(fig)
    return out
