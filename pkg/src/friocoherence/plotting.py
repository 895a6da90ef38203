"""Figure rendering for sweep and sample outputs.

Panels mirror the dataset layout: one row per coherence column, one column
per separation parameter value; family rows draw as curves over
distinguishability, random rows as a point cloud.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

METRIC_COLUMNS = ("C_sep", "C_ancilla", "discord", "C_me", "C_frio", "C_conc", "C_extra")

METRIC_NAMES = {
    "C_sep": "separation coherence",
    "C_ancilla": "ancilla coherence",
    "discord": "quantum discord",
    "C_me": "identification coherence",
    "C_frio": "standard coherence",
    "C_conc": "concatenated coherence",
    "C_extra": "extra concatenation cost",
}

__all__ = ["render_rows"]


def _present_metrics(rows, requested=None):
    candidates = requested if requested is not None else METRIC_COLUMNS
    present = []
    for column in candidates:
        if column in METRIC_COLUMNS and any(row.get(column) is not None for row in rows):
            present.append(column)
    return present


def render_rows(rows, path, columns=None, dpi=150):
    """Render the given sweep/sample rows to an image file.

    ``columns`` restricts which coherence columns get a panel; columns whose
    values are all absent are dropped either way.
    """
    if not rows:
        raise ValueError("nothing to plot: no rows")
    metrics = _present_metrics(rows, columns)
    if not metrics:
        raise ValueError("nothing to plot: no coherence columns with values")
    xi_values = sorted({row["xi"] for row in rows})
    fig, axes = plt.subplots(
        len(metrics),
        len(xi_values),
        figsize=(3.2 * len(xi_values), 2.6 * len(metrics)),
        squeeze=False,
        sharex=True,
    )
    for column_index, xi in enumerate(xi_values):
        at_xi = [row for row in rows if row["xi"] == xi]
        random_rows = [row for row in at_xi if row["source"] == "random"]
        family_sources = sorted({row["source"] for row in at_xi if row["source"] != "random"})
        for row_index, metric in enumerate(metrics):
            axis = axes[row_index][column_index]
            if random_rows:
                xs = [row["D"] for row in random_rows if row[metric] is not None]
                ys = [row[metric] for row in random_rows if row[metric] is not None]
                axis.plot(xs, ys, ".", markersize=2, alpha=0.3, color="0.4", zorder=1)
            for source in family_sources:
                family = [row for row in at_xi if row["source"] == source and row[metric] is not None]
                family.sort(key=lambda row: row["a_min"])
                if not family:
                    continue
                label = f"a0={family[0]['coeffs'][0]:.3g}"
                if len(family) == 1:
                    axis.plot(family[0]["D"], family[0][metric], "o", label=label, zorder=3)
                else:
                    axis.plot(
                        [row["D"] for row in family],
                        [row[metric] for row in family],
                        lw=1.4,
                        label=label,
                        zorder=2,
                    )
            if row_index == 0:
                axis.set_title(f"xi = {xi:g}")
            if column_index == 0:
                axis.set_ylabel(f"{METRIC_NAMES[metric]} (bits)")
            if row_index == len(metrics) - 1:
                axis.set_xlabel("distinguishability")
            if row_index == 0 and column_index == len(xi_values) - 1 and family_sources:
                axis.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
