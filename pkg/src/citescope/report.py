"""Deterministic emitters: delimited tables, JSON, and SVG figures.

All files are written atomically (temp file + rename).  Numeric cells use
shortest round-trip decimal formatting, so re-parsing a CSV reproduces the
emitted values exactly.  Figures are rendered to self-contained SVG 1.1
with a fixed hash salt and no timestamp metadata; identical inputs yield
byte-identical files regardless of thread count.
"""

from __future__ import annotations

import io
import json
import os
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure

from .authors import AuthorMilestoneStats
from .cluster import (LABEL_FADING, LABEL_MILESTONE, LABEL_SUPER,
                      ClusterAssignment, Dendrogram, RelativeSeries)
from .forgetting import ForgettingCurve, SmoothnessStats
from .milestone import MilestoneRecord, SuperMilestoneFlag
from .refparse import paper_id_year
from .timeseries import CitationSeries, MilestonePanel

_SVG_RC = {
    "svg.hashsalt": "citescope",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
}

_LABEL_COLORS = {
    LABEL_SUPER: "#d62728",
    LABEL_FADING: "#17becf",
    LABEL_MILESTONE: "#1f77b4",
}


# --------------------------------------------------------------------------
# low-level writers

def fmt_num(value) -> str:
    """Shortest round-trip decimal for a numeric cell."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return repr(float(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: str, data: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_num(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload) -> None:
    _atomic_write(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")


def render_svg(fig: Figure) -> str:
    """Render a figure to deterministic, self-contained SVG text."""
    buf = io.StringIO()
    with mpl.rc_context(_SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def write_svg(path: str, fig: Figure) -> None:
    _atomic_write(path, render_svg(fig))


# --------------------------------------------------------------------------
# tables

def emit_curves_csv(path: str, curves: Mapping[int, "CitationCurve"]) -> None:
    rows = [(cy, year, curve.counts[year])
            for cy, curve in sorted(curves.items())
            for year in sorted(curve.counts)]
    write_csv(path, ("citing_year", "cited_year", "count"), rows)


def emit_series_csv(path: str, series_map: Mapping[str, CitationSeries]) -> None:
    rows = [(pid, year, series_map[pid].by_year[year])
            for pid in sorted(series_map)
            for year in sorted(series_map[pid].by_year)]
    write_csv(path, ("paper_id", "citing_year", "count"), rows)


def emit_panels_csv(path: str, panels: Sequence[MilestonePanel]) -> None:
    rows = [(p.citing_year, year, p.absolute[year], float(p.relative[year]))
            for p in sorted(panels, key=lambda p: p.citing_year)
            for year in sorted(p.absolute)]
    write_csv(path, ("citing_year", "cited_year", "absolute", "relative"), rows)


def emit_forgetting_csv(path: str, curves: Sequence[ForgettingCurve]) -> None:
    rows = [(c.citing_year, year, float(c.values[year]), c.mode)
            for c in sorted(curves, key=lambda c: (c.mode, c.citing_year))
            for year in sorted(c.values)]
    write_csv(path, ("citing_year", "cited_year", "value", "mode"), rows)


def emit_smoothness_csv(path: str, trend: Mapping[int, SmoothnessStats]) -> None:
    rows = [(year, float(s.variance_of_derivative), float(s.total_variation))
            for year, s in sorted(trend.items())]
    write_csv(path, ("citing_year", "variance_of_derivative", "total_variation"), rows)


def emit_milestones_csv(path: str, ranked: Sequence[tuple[str, int]],
                        records: Mapping[str, MilestoneRecord],
                        flags: Mapping[str, SuperMilestoneFlag]) -> None:
    rows = []
    for rank, (pid, total) in enumerate(ranked, start=1):
        rec = records[pid]
        flag = flags[pid]
        rows.append((rank, pid, total, rec.slope, rec.sign, rec.tcs, rec.tci,
                     rec.nci, rec.mc, rec.formula, flag.is_super,
                     float(flag.peak_share), flag.peak_year))
    write_csv(path, ("rank", "paper_id", "total", "slope", "sign", "tcs", "tci",
                     "nci", "mc", "formula_mode", "is_super", "peak_share",
                     "peak_year"), rows)


def emit_clusters_csv(path: str, assignments: Sequence[ClusterAssignment]) -> None:
    rows = [(a.paper, a.cluster, a.label)
            for a in sorted(assignments, key=lambda a: a.paper)]
    write_csv(path, ("paper_id", "cluster", "label"), rows)


def emit_dendrogram_json(path: str, dendrogram: Dendrogram,
                         papers: Sequence[str]) -> None:
    write_json(path, {
        "leaves": list(papers),
        "leaf_order": list(dendrogram.leaf_order),
        "merges": [{"node_a": a, "node_b": b, "height": h, "size": s}
                   for a, b, h, s in dendrogram.merges],
    })


def emit_authors_csv(path: str, stats: Sequence[AuthorMilestoneStats]) -> None:
    rows = [(s.author, s.milestone_count, "|".join(s.milestones)) for s in stats]
    write_csv(path, ("author_key", "milestone_count", "milestone_ids"), rows)


def emit_concentration_csv(path: str, selected: Sequence[AuthorMilestoneStats],
                           shares: Sequence[Fraction]) -> None:
    rows = [(s.author, s.milestone_count, float(share))
            for s, share in zip(selected, shares)]
    write_csv(path, ("author_key", "count", "cumulative_share"), rows)


def emit_cumulative_csv(path: str, by_citing_year: Mapping[int, Mapping[int, Fraction]]) -> None:
    rows = [(cy, year, float(pct))
            for cy, shares in sorted(by_citing_year.items())
            for year, pct in sorted(shares.items())]
    write_csv(path, ("citing_year", "cited_year", "cumulative_percent"), rows)


# --------------------------------------------------------------------------
# figures

def _require(data, what: str) -> None:
    if not data:
        raise ValueError(f"cannot plot empty {what}")


def figure_forgetting(curves: Sequence[ForgettingCurve],
                      bars: Optional[Mapping[int, int]] = None,
                      log_scale: bool = True) -> Figure:
    """Forgetting curves, one line per citing year, optionally log-scaled,
    with milestone-citation bars on a secondary axis.

    On a log scale, zero values are drawn at an explicit floor (half the
    smallest positive value), marked by a dotted break line.
    """
    _require(curves, "forgetting curves")
    fig = Figure(figsize=(9.0, 5.5))
    ax = fig.subplots()
    curves = sorted(curves, key=lambda c: c.citing_year)
    cmap = mpl.colormaps["viridis"]
    span = max(1, curves[-1].citing_year - curves[0].citing_year)
    floor = None
    if log_scale:
        positives = [float(v) for c in curves for v in c.values.values() if v > 0]
        _require(positives, "forgetting curves (all values zero)")
        floor = min(positives) / 2.0
    for curve in curves:
        years = sorted(curve.values)
        values = [float(curve.values[y]) for y in years]
        if log_scale:
            values = [v if v > 0 else floor for v in values]
        color = cmap((curve.citing_year - curves[0].citing_year) / span)
        ax.plot(years, values, lw=0.9, color=color)
    if log_scale:
        ax.set_yscale("log")
        ax.axhline(floor, color="0.6", lw=0.8, ls=":")
        ax.annotate("zero floor", xy=(0.005, floor), xycoords=("axes fraction", "data"),
                    fontsize=7, color="0.4", va="bottom")
    ax.set_xlabel("cited publication year")
    ax.set_ylabel(f"growth-adjusted citations ({curves[0].mode})")
    ax.margins(x=0.05, y=0.05)
    if bars:
        ax2 = ax.twinx()
        years = sorted(bars)
        ax2.bar(years, [bars[y] for y in years], color="#d62728", alpha=0.30,
                width=0.8, zorder=0)
        ax2.set_ylabel("citations to top milestones by publication year")
    fig.suptitle("Forgetting curves by proceedings year", fontsize=11)
    fig.tight_layout()
    return fig


def figure_panels(panels: Sequence[MilestonePanel]) -> Figure:
    """Absolute (top row) and relative (bottom row) milestone citations per
    selected proceedings year, with moment statistics annotated."""
    _require(panels, "milestone panels")
    panels = sorted(panels, key=lambda p: p.citing_year)
    n = len(panels)
    fig = Figure(figsize=(2.6 * n + 1.0, 5.0))
    axes = fig.subplots(2, n, squeeze=False)
    for col, panel in enumerate(panels):
        years = sorted(panel.absolute)
        top, bottom = axes[0][col], axes[1][col]
        top.bar(years, [panel.absolute[y] for y in years], width=0.85, color="#1f77b4")
        top.set_title(str(panel.citing_year), fontsize=9)
        note = (f"sd={panel.stats.sd:.2f}\nkurt={panel.stats.kurtosis:.2f}"
                f"\nskew={panel.stats.skewness:.2f}")
        top.annotate(note, xy=(0.03, 0.97), xycoords="axes fraction",
                     fontsize=6, va="top")
        bottom.bar(years, [float(panel.relative[y]) * 100 for y in years],
                   width=0.85, color="#ff7f0e")
        if col == 0:
            top.set_ylabel("absolute citations")
            bottom.set_ylabel("% of year's citations")
        bottom.set_xlabel("published")
    fig.suptitle("Citations to prior milestones", fontsize=11)
    fig.tight_layout()
    return fig


def figure_mc(records: Sequence[MilestoneRecord]) -> Figure:
    """Bubble chart: publication year vs milestone coefficient, bubble
    radius proportional to the square root of the citation total, dashed
    line at zero."""
    _require(records, "milestone records")
    fig = Figure(figsize=(9.0, 5.0))
    ax = fig.subplots()
    years = [paper_id_year(r.paper) for r in records]
    mcs = [r.mc for r in records]
    # Marker area in points^2 is proportional to total, so radius goes as
    # the square root of the citation total.
    sizes = [max(4.0, 1.2 * r.total) for r in records]
    ax.scatter(years, mcs, s=sizes, alpha=0.45, color="#1f77b4",
               edgecolors="none")
    ax.axhline(0.0, ls="--", color="0.3", lw=1.0)
    ax.set_xlabel("publication year")
    ax.set_ylabel("milestone coefficient")
    ax.margins(x=0.05, y=0.05)
    fig.suptitle("Milestone coefficient of the most cited papers", fontsize=11)
    fig.tight_layout()
    return fig


def figure_smoothness(trend: Mapping[int, SmoothnessStats]) -> Figure:
    _require(trend, "smoothness trend")
    fig = Figure(figsize=(7.0, 4.2))
    ax = fig.subplots()
    years = sorted(trend)
    ax.plot(years, [float(trend[y].total_variation) for y in years],
            marker="o", ms=3, lw=1.2, color="#1f77b4", label="total variation")
    ax2 = ax.twinx()
    ax2.plot(years, [float(trend[y].variance_of_derivative) for y in years],
             marker="s", ms=3, lw=1.2, color="#ff7f0e", label="variance of derivative")
    ax.set_xlabel("proceedings year")
    ax.set_ylabel("total variation")
    ax2.set_ylabel("variance of derivative")
    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], fontsize=8, loc="upper right")
    fig.suptitle("Forgetting-curve smoothness over time", fontsize=11)
    fig.tight_layout()
    return fig


def figure_elbow(inertias: Mapping[int, float]) -> Figure:
    _require(inertias, "elbow data")
    fig = Figure(figsize=(5.0, 3.8))
    ax = fig.subplots()
    ks = sorted(inertias)
    ax.plot(ks, [inertias[k] for k in ks], marker="o", color="#1f77b4")
    ax.set_xlabel("clusters (k)")
    ax.set_ylabel("inertia")
    ax.set_xticks(ks)
    fig.suptitle("Elbow diagnostic", fontsize=11)
    fig.tight_layout()
    return fig


def figure_dendrogram(dendrogram: Dendrogram, labels: Sequence[str]) -> Figure:
    _require(dendrogram.merges, "dendrogram")
    from scipy.cluster.hierarchy import dendrogram as scipy_dendrogram

    fig = Figure(figsize=(max(6.0, 0.22 * len(labels) + 2.0), 4.5))
    ax = fig.subplots()
    z = np.array([[a, b, h, s] for a, b, h, s in dendrogram.merges], dtype=np.float64)
    scipy_dendrogram(z, ax=ax, labels=list(labels), leaf_font_size=6,
                     color_threshold=0.0, above_threshold_color="#1f77b4")
    ax.set_ylabel("merge height")
    fig.suptitle("Ward dendrogram", fontsize=11)
    fig.tight_layout()
    return fig


def figure_cluster_series(series: Sequence[RelativeSeries],
                          assignments: Sequence[ClusterAssignment]) -> Figure:
    _require(series, "relative series")
    fig = Figure(figsize=(9.0, 5.0))
    ax = fig.subplots()
    labels_by_paper = {a.paper: a.label for a in assignments}
    seen = set()
    for s in series:
        label = labels_by_paper.get(s.paper, LABEL_MILESTONE)
        ax.plot(s.years, [v * 100 for v in s.shares], lw=0.9,
                color=_LABEL_COLORS[label],
                label=label if label not in seen else None)
        seen.add(label)
    ax.set_xlabel("proceedings year")
    ax.set_ylabel("% of year's citations")
    ax.legend(fontsize=8)
    fig.suptitle("Relative citations to milestones by cluster", fontsize=11)
    fig.tight_layout()
    return fig


def figure_authors(stats: Sequence[AuthorMilestoneStats]) -> Figure:
    """Histogram of milestone counts per author, log-scaled to keep small
    bars visible."""
    _require(stats, "author stats")
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    counts: dict[int, int] = {}
    for s in stats:
        counts[s.milestone_count] = counts.get(s.milestone_count, 0) + 1
    xs = sorted(counts)
    ax.bar(xs, [counts[x] for x in xs], color="#1f77b4")
    ax.set_yscale("log")
    ax.set_xlabel("milestones (co-)authored")
    ax.set_ylabel("authors")
    ax.set_xticks(xs)
    fig.suptitle("Milestone authorship counts", fontsize=11)
    fig.tight_layout()
    return fig


def figure_concentration(selected: Sequence[AuthorMilestoneStats],
                         shares: Sequence[Fraction]) -> Figure:
    """Per-author milestone counts (bars) and the cumulative share of the
    milestone set they jointly cover (line, secondary axis)."""
    _require(selected, "concentration data")
    fig = Figure(figsize=(7.0, max(3.5, 0.17 * len(selected) + 1.5)))
    ax = fig.subplots()
    ys = np.arange(len(selected))[::-1]
    ax.barh(ys, [s.milestone_count for s in selected], color="#17becf", height=0.7)
    ax.set_yticks(ys)
    ax.set_yticklabels([s.author for s in selected], fontsize=6)
    ax.set_xlabel("milestones (co-)authored")
    ax2 = ax.twiny()
    ax2.plot([float(s) * 100 for s in shares], ys, color="#d62728", lw=1.4)
    ax2.set_xlabel("cumulative % of milestone set covered")
    fig.suptitle("Author concentration", fontsize=11)
    fig.tight_layout()
    return fig


def figure_cumulative(by_citing_year: Mapping[int, Mapping[int, Fraction]]) -> Figure:
    _require(by_citing_year, "cumulative shares")
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.subplots()
    cmap = mpl.colormaps["viridis"]
    citing_years = sorted(by_citing_year)
    span = max(1, citing_years[-1] - citing_years[0])
    for cy in citing_years:
        shares = by_citing_year[cy]
        if not shares:
            continue
        years = sorted(shares)
        ax.plot(years, [float(shares[y]) for y in years], lw=1.2,
                color=cmap((cy - citing_years[0]) / span), label=str(cy))
    ax.set_xlabel("cited publication year")
    ax.set_ylabel("cumulative % of milestone citations")
    ax.legend(fontsize=7, ncols=2)
    fig.suptitle("Cumulative citations to prior milestones", fontsize=11)
    fig.tight_layout()
    return fig
