"""Figure rendering for the report path; PNGs land next to the CSV output.

Figures are presentation-only: every number they show is also in the
delimited output, which remains the machine-readable boundary.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_table_figure", "GOLDEN"]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_FIGSIZE = (6.0, 6.0 * GOLDEN)


def _save(fig, outdir, name):
    path = os.path.join(outdir, name + ".png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _plot_scan(rows, title):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    r = np.hypot([row[2] for row in rows], [row[3] for row in rows])
    ratio = np.asarray([row[4] for row in rows])
    ax.loglog(r, ratio, ".", ms=2.5, alpha=0.6)
    ax.set_xlabel("|z|")
    ax.set_ylabel("ratio")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _plot_norm(rows, title):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    by_p = {}
    for (p, r0, r1, mass, _cum) in rows:
        by_p.setdefault(p, []).append((r0, r1, mass))
    for p, annuli in sorted(by_p.items()):
        pts = [(math.sqrt(r0 * r1), m) for (r0, r1, m) in annuli if r0 > 0]
        ax.loglog([r for r, _ in pts], [m for _, m in pts], "o-",
                  label=f"p = {p:g}")
    ax.set_xlabel("geometric mean radius")
    ax.set_ylabel("annulus mass")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return fig


def _plot_density(rows, title):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    by_set = {}
    for (label, rho, sup, inf) in rows:
        by_set.setdefault(label, []).append((rho, sup, inf))
    for label, pts in sorted(by_set.items()):
        rho = [r for r, _, _ in pts]
        ax.plot(rho, [s for _, s, _ in pts], "o-", label=f"{label} sup")
        ax.plot(rho, [i for _, _, i in pts], "s--", label=f"{label} inf")
    ax.set_xlabel("rho")
    ax.set_ylabel("N / (pi rho^2)")
    ax.set_title(title)
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    return fig


def render_table_figure(outdir, table_name, header, rows):
    """Render the figure matching a known table layout; returns path or None."""
    if not rows:
        return None
    if header[:2] == ("r_in", "r_out") and header[-1] == "ratio":
        return _save(_plot_scan(rows, table_name), outdir, table_name)
    if table_name.startswith("norm"):
        return _save(_plot_norm(rows, table_name), outdir, table_name)
    if table_name == "density":
        return _save(_plot_density(rows, table_name), outdir, table_name)
    return None
