"""Static SVG figures rendered with matplotlib (Agg backend, no display).

Output is byte-stable: the SVG hash salt is fixed and no date is embedded.
"""
from __future__ import annotations

from contextlib import contextmanager

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.figsize": (5.0, 5.0),
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "frgeom",
    "svg.fonttype": "none",
}


@contextmanager
def _figure(**subplot_kw):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(**subplot_kw)
        try:
            yield fig, ax
        finally:
            plt.close(fig)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})


def planar_figure(curves, path, title=None):
    """Polylines ``(label, x, y)`` in the frame ``{phi0, psi_hat}``."""
    with _figure() as (fig, ax):
        for label, x, y in curves:
            ax.plot(x, y, label=label)
        ax.plot([0.0], [0.0], marker="+", color="0.4", linestyle="none")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel(r"$x = r\cos\theta$")
        ax.set_ylabel(r"$y = r\sin\theta$")
        if title:
            ax.set_title(title)
        ax.legend(loc="best", frameon=False)
        _save(fig, path)


def curvature_figure(table: np.ndarray, path, title=None):
    """Both sectional curvatures against ``s`` from a :func:`sectional_table`."""
    with _figure(figsize=(6.0, 3.5)) as (fig, ax):
        s = table[:, 0]
        ax.plot(s, table[:, 4], marker=".", label="sphere plane")
        ax.plot(s, table[:, 5], marker=".", label="mixed plane")
        ax.axhline(0.0, color="0.6", linewidth=0.5)
        ax.set_xlabel("s")
        ax.set_ylabel("sectional curvature")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        _save(fig, path)


def profile_figure(curve, path, title=None):
    """Meridian ``(c1, c2)`` of the hypersurface of revolution, valid part only."""
    with _figure() as (fig, ax):
        ax.plot(curve.c1_vals, curve.c2_vals)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("c1 (axis)")
        ax.set_ylabel("c2 (radius)")
        if title:
            ax.set_title(title)
        _save(fig, path)
