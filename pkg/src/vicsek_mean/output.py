"""CSV and SVG writers.

CSV files use LF line endings and ``%.17g`` floats, which round-trip every
double exactly.
"""

from __future__ import annotations

import csv
import math
from contextlib import contextmanager
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .ensemble import EnsembleSummary, SweepRow, TrajectoryRecord

__all__ = [
    "METRICS_HEADER",
    "fmt",
    "write_metrics_csv",
    "write_summary_csv",
    "write_sweep_csv",
    "write_control_csv",
    "write_positions_csv",
    "render_plot",
]

METRICS_HEADER = ("run", "t", "d_theta", "d_x", "components", "mean_heading")
SUMMARY_HEADER = ("t", "mean_d_theta", "std_d_theta", "ci_halfwidth", "runs", "exceed_tau_count", "exceed_a_count")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@contextmanager
def _csv_writer(path):
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield csv.writer(fh, lineterminator="\n")


def write_metrics_csv(trajectories: Sequence[TrajectoryRecord], path) -> None:
    """One row per ``(run, t)``."""
    if not trajectories:
        raise ValueError("no trajectories to write")
    with _csv_writer(path) as w:
        w.writerow(METRICS_HEADER)
        for tr in trajectories:
            for t, dth, dx, c, m in zip(tr.t, tr.d_theta, tr.d_x, tr.components, tr.mean_heading):
                w.writerow((tr.run_index, int(t), fmt(dth), fmt(dx), int(c), fmt(m)))


def write_summary_csv(summary: EnsembleSummary, path) -> None:
    with _csv_writer(path) as w:
        w.writerow(SUMMARY_HEADER)
        for k in range(summary.t.size):
            w.writerow((
                int(summary.t[k]),
                fmt(summary.mean_d_theta[k]),
                fmt(summary.std_d_theta[k]),
                fmt(summary.ci_halfwidth[k]),
                summary.runs,
                int(summary.exceed_tau_count[k]),
                int(summary.exceed_a_count[k]),
            ))


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    with _csv_writer(path) as w:
        w.writerow(("delta", "plateau", "plateau_se", "tau", "passed"))
        for row in rows:
            w.writerow((fmt(row.delta), fmt(row.plateau), fmt(row.plateau_se), fmt(row.tau), int(row.passed)))


def write_control_csv(traj: TrajectoryRecord, path) -> None:
    """Controller run with the phase applied at each step (empty on the final row)."""
    phases = list(traj.phases or ())
    with _csv_writer(path) as w:
        w.writerow(("t", "phase", "d_theta", "d_x", "components", "mean_heading"))
        for k in range(len(traj)):
            w.writerow((
                int(traj.t[k]),
                phases[k] if k < len(phases) else "",
                fmt(traj.d_theta[k]),
                fmt(traj.d_x[k]),
                int(traj.components[k]),
                fmt(traj.mean_heading[k]),
            ))


def write_positions_csv(traj: TrajectoryRecord, path) -> None:
    if traj.states is None:
        raise ValueError("trajectory was recorded without states")
    with _csv_writer(path) as w:
        w.writerow(("run", "t", "agent", "theta", "x", "y"))
        for world in traj.states:
            for i in range(world.n):
                w.writerow((traj.run_index, world.t, i, fmt(world.theta[i]), fmt(world.x[i, 0]), fmt(world.x[i, 1])))


# ---------------------------------------------------------------- SVG

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 640, 400
_ML, _MR, _MT, _MB = 70, 150, 30, 50


def _nice_ticks(hi: float, count: int = 5) -> list[float]:
    if hi <= 0:
        return [0.0]
    raw = hi / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    return [k * step for k in range(int(hi / step + 1e-9) + 1)]


def render_plot(series: Sequence[tuple[float, EnsembleSummary]], path, title: str | None = None) -> None:
    """Mean ``d_theta`` against ``t`` with a 95% band, one line per ``delta``."""
    if not series:
        raise ValueError("nothing to plot")
    horizons = {int(s.t[-1]) for _, s in series}
    if len(horizons) != 1:
        raise ValueError(f"summaries have different horizons: {sorted(horizons)}")
    horizon = max(horizons.pop(), 1)

    def upper(s):
        return np.where(np.isfinite(s.ci_halfwidth), s.mean_d_theta + s.ci_halfwidth, s.mean_d_theta)

    ymax = max(float(upper(s).max()) for _, s in series)
    ymax = 1.0 if ymax <= 0 else 1.05 * ymax
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(t):
        return _ML + pw * t / horizon

    def py(y):
        return _MT + ph * (1 - y / ymax)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_ML + pw / 2:.2f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    # axes
    out.append(f'<line class="axis" x1="{_ML}" y1="{py(0):.2f}" x2="{_ML + pw}" y2="{py(0):.2f}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{py(0):.2f}" stroke="black"/>')
    for tv in _nice_ticks(horizon):
        out.append(
            f'<text x="{px(tv):.2f}" y="{py(0) + 16:.2f}" text-anchor="middle" font-size="11">{tv:g}</text>'
        )
    for yv in _nice_ticks(ymax):
        out.append(f'<text x="{_ML - 6}" y="{py(yv) + 4:.2f}" text-anchor="end" font-size="11">{yv:g}</text>')
    out.append(f'<text x="{_ML + pw / 2:.2f}" y="{_H - 10}" text-anchor="middle" font-size="13">t</text>')
    out.append(
        f'<text x="16" y="{_MT + ph / 2:.2f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {_MT + ph / 2:.2f})">mean d_theta</text>'
    )
    for k, (delta, s) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        ts = s.t
        if np.all(np.isfinite(s.ci_halfwidth)):
            lo = np.maximum(s.mean_d_theta - s.ci_halfwidth, 0.0)
            hi = s.mean_d_theta + s.ci_halfwidth
            pts = [f"{px(t):.2f},{py(y):.2f}" for t, y in zip(ts, hi)]
            pts += [f"{px(t):.2f},{py(y):.2f}" for t, y in zip(ts[::-1], lo[::-1])]
            out.append(f'<polygon class="band" points="{" ".join(pts)}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        pts = " ".join(f"{px(t):.2f},{py(y):.2f}" for t, y in zip(ts, s.mean_d_theta))
        out.append(f'<polyline class="series" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = _MT + 16 * (k + 1)
        out.append(f'<line x1="{_ML + pw + 12}" y1="{ly - 4}" x2="{_ML + pw + 32}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{_ML + pw + 38}" y="{ly}" font-size="12">delta={delta:g}</text>')
    out.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
