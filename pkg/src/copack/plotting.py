"""Figures for sweep reports: one metric per file, one line per heuristic against k."""

from __future__ import annotations

from pathlib import Path

import matplotlib
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .report import ExperimentReport

REPORT_STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.5,
    "lines.markersize": 5,
    "savefig.bbox": "tight",
}

METRICS = (
    ("rel_cost", "Relative cost", "relative_cost"),
    ("packing_ratio", "Packing ratio", "packing_ratio"),
    ("rel_response", "Relative response time", "relative_response"),
)
MARKERS = "osD^v<>ph*"


def plot_report(report: ExperimentReport, out_dir, fmt: str = "png") -> list[Path]:
    """Write one figure per metric into ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    names = list(dict.fromkeys(r.heuristic for r in report.rows))
    written = []
    with matplotlib.rc_context(REPORT_STYLE):
        for attr, label, stem in METRICS:
            fig = Figure(figsize=(5.5, 3.6))
            FigureCanvasAgg(fig)
            ax = fig.add_subplot()
            for idx, name in enumerate(names):
                pts = sorted((r.k, getattr(r, attr)) for r in report.rows
                             if r.heuristic == name and getattr(r, attr) is not None)
                if pts:
                    ks, ys = zip(*pts)
                    ax.plot(ks, ys, marker=MARKERS[idx % len(MARKERS)], label=name)
            if attr != "packing_ratio":
                ax.axhline(1.0, color="0.5", linestyle=":", linewidth=1)
            ax.set_xlabel("pack size k")
            ax.set_ylabel(label)
            ax.set_title(f"{report.workload} (n={report.n}, p={report.p})")
            ax.grid(True, alpha=0.3)
            ax.legend(loc="best", frameon=False)
            path = out_dir / f"{stem}.{fmt}"
            fig.savefig(path)
            written.append(path)
    return written
