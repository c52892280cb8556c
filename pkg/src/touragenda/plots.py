"""Nine-panel bar charts of suite aggregates.

Columns are the visit-count preference (Few, Indif, Many), rows the
occupation preference (Low, Indif, High from top to bottom); each panel has
one bar per metric.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import OccupPref, VisitPref  # noqa: E402
from .scoring import MetricKind  # noqa: E402

FIGURES = {
    "u1_star": ("avg_u1_star.png", "U1*", (0, 1)),
    "u2": ("avg_u2.png", "U2 / vmax", (0, 1)),
    "u3": ("avg_u3.png", "U3 / vmax", (0, 1)),
    "occup": ("avg_occupation.png", "Occupation", (0, 1)),
    "n_visits": ("avg_visits.png", "Visits", None),
    "elapsed_ms": ("avg_runtime.png", "Solve time (ms)", None),
}
ROWS = (OccupPref.LOW, OccupPref.INDIF, OccupPref.HIGH)
COLS = (VisitPref.FEW, VisitPref.INDIF, VisitPref.MANY)


def _label(metric: str) -> str:
    try:
        return MetricKind(metric).label
    except ValueError:
        return metric


def render_figure(aggs: list[dict], measure: str, path: Path) -> Path:
    _, title, ylim = FIGURES[measure]
    grid = [a for a in aggs if a["table"] == "grid"]
    metrics = list(dict.fromkeys(a["metric"] for a in grid))
    top = max((a[measure] or 0 for a in grid), default=1) or 1
    fig, axes = plt.subplots(3, 3, figsize=(9, 8), sharey=True)
    for i, po in enumerate(ROWS):
        for j, pv in enumerate(COLS):
            ax = axes[i][j]
            vals = []
            for m in metrics:
                hit = [a for a in grid if (a["pref_visits"], a["pref_occup"], a["metric"]) == (pv.value, po.value, m)]
                vals.append(hit[0][measure] if hit and hit[0][measure] is not None else 0.0)
            ax.bar(range(len(metrics)), vals, color=[f"C{k}" for k in range(len(metrics))])
            ax.set_xticks(range(len(metrics)), [_label(m) for m in metrics], fontsize=7)
            ax.set_ylim(*(ylim or (0, top * 1.1)))
            if i == 0:
                ax.set_title(f"visits: {pv.value}", fontsize=9)
            if j == 0:
                ax.set_ylabel(f"occup: {po.value}", fontsize=9)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def render_figures(aggs: list[dict], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [render_figure(aggs, m, out / fname) for m, (fname, _, _) in FIGURES.items()]
