"""Serialization and vector rendering of run data.

CSV and JSON artifacts are byte-deterministic: fixed header, 17
significant digits for reals (exact float round trips), UTF-8 with LF
endings, insertion-ordered JSON keys. The SVG emitters are hand rolled
against a fixed five-stop color map so golden files stay stable.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math

from .engine import GenerationRecord, HaltReason, Trajectory
from .sweep import CellSummary, SweepConfig

CSV_HEADER = ("eta,lambda,run,seed,generation,c_t,c_s,effectiveness,"
              "resources,endowment,iterations,halt_reason")

HEATMAP_METRICS = {
    "log2_survival": ("mean_log2_survival", "mean log2 survival time"),
    "mean_c_t": ("mean_final_c_t", "mean final technology complexity"),
    "barrier_fraction": ("barrier_fraction", "barrier fraction"),
}

TRAJECTORY_FIELDS = ("c_t", "c_s", "effectiveness")

_COLOR_STOPS = (
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
)

_LINE_COLORS = ("#4477aa", "#ee6677", "#228833", "#ccbb44",
                "#66ccee", "#aa3377", "#bbbbbb", "#222222")


def _fmt(x) -> str:
    """Shortest representation that parses back to the exact float."""
    return format(float(x), ".17g")


def _escape(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


@dataclasses.dataclass(frozen=True)
class RunTrace:
    """One run's identity plus its recorded trajectory."""

    eta: float
    lam: float
    run: int
    seed: int
    halt: HaltReason
    trajectory: Trajectory


@dataclasses.dataclass(frozen=True)
class TrajectoryTable:
    """Ordered collection of run traces backing the CSV artifact."""

    traces: tuple

    @classmethod
    def from_results(cls, results):
        return cls(traces=tuple(
            RunTrace(eta=r.params.eta, lam=r.params.lam, run=r.run_index,
                     seed=r.params.seed, halt=r.halt, trajectory=r.trajectory)
            for r in results
        ))

    def __len__(self):
        return len(self.traces)


def write_trajectories(table: TrajectoryTable, destination) -> None:
    """Write the table as CSV; empty tables produce a header-only file."""
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for trace in table.traces:
            prefix = (_fmt(trace.eta), _fmt(trace.lam), str(trace.run),
                      str(trace.seed))
            halt = trace.halt.value
            for rec in trace.trajectory:
                fh.write(",".join(prefix + (
                    str(rec.generation), str(rec.c_t), str(rec.c_s),
                    _fmt(rec.effectiveness), _fmt(rec.resources),
                    _fmt(rec.endowment), str(rec.iterations), halt,
                )) + "\n")


def read_trajectories(path) -> TrajectoryTable:
    """Inverse of :func:`write_trajectories`.

    The CSV does not carry per-side adoption counts; they read back as
    zero.
    """
    traces = []
    key = None
    records = []

    def flush():
        if key is not None:
            eta, lam, run, seed, halt = key
            traces.append(RunTrace(eta=eta, lam=lam, run=run, seed=seed,
                                   halt=HaltReason(halt),
                                   trajectory=Trajectory.from_records(records)))

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER.split(","):
            raise ValueError(f"{path}: unexpected trajectory CSV header")
        for row in reader:
            row_key = (float(row[0]), float(row[1]), int(row[2]),
                       int(row[3]), row[11])
            if row_key != key:
                flush()
                key = row_key
                records = []
            records.append(GenerationRecord(
                generation=int(row[4]), c_t=int(row[5]), c_s=int(row[6]),
                effectiveness=float(row[7]), resources=float(row[8]),
                endowment=float(row[9]), iterations=int(row[10]),
                adopted_t=0, adopted_s=0,
            ))
        flush()
    return TrajectoryTable(traces=tuple(traces))


def config_to_dict(config: SweepConfig) -> dict:
    """Flat mapping of a sweep config, re-parseable as a config file.

    The worker count is deliberately absent: results are worker-count
    invariant, so artifacts must not vary with it.
    """
    return {
        "eta_grid": list(config.eta_grid),
        "lambda_grid": list(config.lambda_grid),
        "runs_per_cell": config.runs_per_cell,
        "master_seed": config.master_seed,
        "trajectory_thinning": config.trajectory_thinning,
        "eta": config.base.eta,
        "lambda": config.base.lam,
        "seed": config.base.seed,
        "init_complexity": config.base.init_complexity,
        "endowment0": config.base.endowment0,
        "max_generations": config.base.max_generations,
        "max_complexity": config.base.max_complexity,
        "remove_at_min": config.base.remove_at_min.value,
        "charge": config.base.charge.value,
    }


def _cell_to_dict(cell: CellSummary) -> dict:
    return {
        "eta": cell.eta,
        "lambda": cell.lam,
        "runs": cell.runs,
        "mean_log2_survival": cell.mean_log2_survival,
        "mean_final_c_t": cell.mean_final_c_t,
        "mean_final_c_s": cell.mean_final_c_s,
        "barrier_fraction": cell.barrier_fraction,
        "survivor_fraction": cell.survivor_fraction,
        "ceiling_fraction": cell.ceiling_fraction,
    }


def write_summary(config: SweepConfig, cells, destination) -> None:
    """Write the sweep summary JSON: config echo, cells, global rates."""
    cells = list(cells)
    total = sum(c.runs for c in cells)
    doc = {
        "config": config_to_dict(config),
        "cells": [_cell_to_dict(c) for c in cells],
        "overall": {
            "runs": total,
            "barrier_fraction":
                math.fsum(c.barrier_fraction * c.runs for c in cells) / total,
            "survivor_fraction":
                math.fsum(c.survivor_fraction * c.runs for c in cells) / total,
            "ceiling_fraction":
                math.fsum(c.ceiling_fraction * c.runs for c in cells) / total,
        },
    }
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


def read_summary(path):
    """Read a summary file back as (config dict, list of CellSummary)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    cells = [
        CellSummary(
            eta=entry["eta"], lam=entry["lambda"], runs=entry["runs"],
            mean_log2_survival=entry["mean_log2_survival"],
            mean_final_c_t=entry["mean_final_c_t"],
            mean_final_c_s=entry["mean_final_c_s"],
            barrier_fraction=entry["barrier_fraction"],
            survivor_fraction=entry["survivor_fraction"],
            ceiling_fraction=entry["ceiling_fraction"],
        )
        for entry in doc["cells"]
    ]
    return doc["config"], cells


def _colormap(t: float) -> str:
    if t <= 0.0:
        rgb = _COLOR_STOPS[0][1]
        return "#%02x%02x%02x" % rgb
    if t >= 1.0:
        rgb = _COLOR_STOPS[-1][1]
        return "#%02x%02x%02x" % rgb
    for (t0, c0), (t1, c1) in zip(_COLOR_STOPS, _COLOR_STOPS[1:]):
        if t <= t1:
            f = (t - t0) / (t1 - t0)
            rgb = tuple(int(round(a + (b - a) * f)) for a, b in zip(c0, c1))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % _COLOR_STOPS[-1][1]


def render_heatmap(cells, metric: str, destination) -> None:
    """Render one rectangle per grid cell, colored by the chosen metric."""
    if metric not in HEATMAP_METRICS:
        raise ValueError(
            f"unknown metric {metric!r}; choose from {sorted(HEATMAP_METRICS)}"
        )
    field, label = HEATMAP_METRICS[metric]
    cells = list(cells)
    etas = sorted({c.eta for c in cells})
    lams = sorted({c.lam for c in cells})
    lookup = {}
    for c in cells:
        key = (c.eta, c.lam)
        if key in lookup:
            raise ValueError(f"duplicate cell for eta={c.eta}, lambda={c.lam}")
        lookup[key] = getattr(c, field)
    if len(lookup) != len(etas) * len(lams):
        raise ValueError("cells do not form a complete eta x lambda grid")

    vmin = min(lookup.values())
    vmax = max(lookup.values())
    span = vmax - vmin
    cw, ch = 44.0, 34.0
    ml, mt, mb, legend_w = 74.0, 46.0, 58.0, 86.0
    width = ml + cw * len(etas) + legend_w + 30.0
    height = mt + ch * len(lams) + mb

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" '
        f'height="{height:.2f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="#ffffff"/>',
        f'<text x="{ml:.2f}" y="24" font-family="sans-serif" font-size="14">'
        f'{_escape(label)}</text>',
    ]
    for i, eta in enumerate(etas):
        for j, lam in enumerate(lams):
            v = lookup[(eta, lam)]
            t = 0.5 if span == 0 else (v - vmin) / span
            x = ml + i * cw
            y = mt + (len(lams) - 1 - j) * ch
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" '
                f'height="{ch:.2f}" fill="{_colormap(t)}"/>'
            )
    # axis tick labels on column centres and row centres
    for i, eta in enumerate(etas):
        x = ml + (i + 0.5) * cw
        y = mt + ch * len(lams) + 16.0
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" '
            f'font-size="10" text-anchor="middle">{format(eta, "g")}</text>'
        )
    for j, lam in enumerate(lams):
        x = ml - 8.0
        y = mt + (len(lams) - 1 - j + 0.5) * ch + 3.0
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" '
            f'font-size="10" text-anchor="end">{format(lam, "g")}</text>'
        )
    axis_y = mt + ch * len(lams) + 40.0
    parts.append(
        f'<text x="{ml + cw * len(etas) / 2:.2f}" y="{axis_y:.2f}" '
        f'font-family="sans-serif" font-size="12" text-anchor="middle">eta</text>'
    )
    parts.append(
        f'<text x="16" y="{mt + ch * len(lams) / 2:.2f}" '
        f'font-family="sans-serif" font-size="12">lambda</text>'
    )
    # legend: stacked slices from max at the top to min at the bottom
    lx = ml + cw * len(etas) + 26.0
    lh = ch * len(lams)
    steps = 24
    for s in range(steps):
        t = 1.0 - (s + 0.5) / steps
        y = mt + lh * s / steps
        parts.append(
            f'<rect x="{lx:.2f}" y="{y:.2f}" width="16" '
            f'height="{lh / steps + 0.5:.2f}" fill="{_colormap(t)}"/>'
        )
    parts.append(
        f'<text x="{lx + 22:.2f}" y="{mt + 4:.2f}" font-family="sans-serif" '
        f'font-size="10">{format(vmax, ".4g")}</text>'
    )
    parts.append(
        f'<text x="{lx + 22:.2f}" y="{mt + lh:.2f}" font-family="sans-serif" '
        f'font-size="10">{format(vmin, ".4g")}</text>'
    )
    parts.append("</svg>")
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")


def render_trajectories(table: TrajectoryTable, field: str, destination,
                        log_y: bool = False) -> None:
    """Render one polyline per run, faceted into one panel per cell.

    :param field: which record column to plot, one of ``c_t``, ``c_s``,
        ``effectiveness``.
    :param log_y: plot log2 of the values (values clamp at 1e-9 first).
    """
    if field not in TRAJECTORY_FIELDS:
        raise ValueError(
            f"unknown field {field!r}; choose from {TRAJECTORY_FIELDS}"
        )
    traces = [t for t in table.traces if len(t.trajectory) > 0]
    if not traces:
        raise ValueError("trajectory table has no records to plot")

    panels = {}
    for trace in traces:
        panels.setdefault((trace.eta, trace.lam), []).append(trace)
    keys = list(panels)
    ncols = min(3, len(keys))
    nrows = (len(keys) + ncols - 1) // ncols
    pw, ph, gap = 280.0, 190.0, 34.0
    ml, mt = 46.0, 40.0
    width = ml + ncols * (pw + gap)
    height = mt + nrows * (ph + gap) + 20.0

    def transform(v):
        return math.log2(max(v, 1e-9)) if log_y else v

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" '
        f'height="{height:.2f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="#ffffff"/>',
        f'<text x="{ml:.2f}" y="22" font-family="sans-serif" font-size="14">'
        f'{_escape(field)}{" (log2)" if log_y else ""} per generation</text>',
    ]
    for p, key in enumerate(keys):
        eta, lam = key
        px = ml + (p % ncols) * (pw + gap)
        py = mt + (p // ncols) * (ph + gap)
        cell_traces = panels[key]
        xs = [int(rec) for t in cell_traces for rec in t.trajectory.generation]
        ys = [transform(float(v)) for t in cell_traces
              for v in getattr(t.trajectory, field)]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        xspan = (x1 - x0) or 1
        yspan = (y1 - y0) or 1.0
        parts.append(
            f'<rect x="{px:.2f}" y="{py:.2f}" width="{pw:.2f}" '
            f'height="{ph:.2f}" fill="none" stroke="#888888"/>'
        )
        parts.append(
            f'<text x="{px + 4:.2f}" y="{py - 5:.2f}" font-family="sans-serif" '
            f'font-size="11">eta={format(eta, "g")}, lambda={format(lam, "g")}</text>'
        )
        for r, trace in enumerate(cell_traces):
            color = _LINE_COLORS[r % len(_LINE_COLORS)]
            points = []
            for rec_i in range(len(trace.trajectory)):
                g = int(trace.trajectory.generation[rec_i])
                v = transform(float(getattr(trace.trajectory, field)[rec_i]))
                x = px + (g - x0) / xspan * (pw - 8.0) + 4.0
                y = py + ph - 4.0 - (v - y0) / yspan * (ph - 8.0)
                points.append(f"{x:.2f},{y:.2f}")
            parts.append(
                f'<polyline points="{" ".join(points)}" fill="none" '
                f'stroke="{color}" stroke-width="1"/>'
            )
        parts.append(
            f'<text x="{px - 4:.2f}" y="{py + 10:.2f}" font-family="sans-serif" '
            f'font-size="9" text-anchor="end">{format(y1, ".4g")}</text>'
        )
        parts.append(
            f'<text x="{px - 4:.2f}" y="{py + ph:.2f}" font-family="sans-serif" '
            f'font-size="9" text-anchor="end">{format(y0, ".4g")}</text>'
        )
        parts.append(
            f'<text x="{px + 4:.2f}" y="{py + ph + 14:.2f}" '
            f'font-family="sans-serif" font-size="9">{x0}</text>'
        )
        parts.append(
            f'<text x="{px + pw:.2f}" y="{py + ph + 14:.2f}" '
            f'font-family="sans-serif" font-size="9" text-anchor="end">{x1}</text>'
        )
    parts.append("</svg>")
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")
