"""PNG figures via matplotlib (optional extra: ``pip install artifact[plot]``).

Figures are built on the object-oriented API with an Agg canvas so no
global pyplot state is touched.
"""

from __future__ import annotations

import numpy as np

from .errors import PlaquetteError


class PlottingUnavailable(PlaquetteError, ImportError):
    pass


def _figure(width=5.0, height=4.0):
    try:
        from matplotlib.backends.backend_agg import FigureCanvasAgg
        from matplotlib.figure import Figure
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise PlottingUnavailable("matplotlib is required for PNG figures") from exc
    fig = Figure(figsize=(width, height), dpi=120)
    FigureCanvasAgg(fig)
    return fig


def _save(fig, path, metadata):
    meta = {"Software": "plaquette"}
    if metadata:
        meta["Description"] = metadata
    fig.savefig(path, metadata=meta)


def orbit_figure(traj, path, title="", metadata=""):
    """Orbit centre in the plane plus x_c(t)."""
    fig = _figure(9.0, 4.0)
    ax1, ax2 = fig.subplots(1, 2)
    ax1.plot(traj.xc, traj.yc, lw=0.8, color="#1f4e79")
    ax1.plot(traj.xc[:1], traj.yc[:1], "o", color="#2e7d32", ms=4)
    n = len(traj.times)
    for i in np.linspace(0, n - 2, 10, dtype=int)[1:]:
        ax1.annotate(
            "",
            xy=(traj.xc[i + 1], traj.yc[i + 1]),
            xytext=(traj.xc[i], traj.yc[i]),
            arrowprops=dict(arrowstyle="->", color="#c0392b"),
        )
    ax1.set_xlim(-1.05, 1.05)
    ax1.set_ylim(-1.05, 1.05)
    ax1.set_aspect("equal")
    ax1.set_xlabel("$x_c$")
    ax1.set_ylabel("$y_c$")
    ax2.plot(traj.times, traj.xc, lw=0.6)
    ax2.set_xlabel("$t$")
    ax2.set_ylabel("$x_c$")
    ax2.set_ylim(-1.05, 1.05)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path, metadata)


def ratio_figure(phi, k_over_j, ratio, path, metadata=""):
    """Contour map of alpha/beta; rows of ``ratio`` follow ``phi``."""
    fig = _figure()
    ax = fig.add_subplot()
    shown = np.where(np.isfinite(ratio), ratio, np.nan)
    shown = np.clip(shown, 0, 6)
    cs = ax.contourf(k_over_j, phi / np.pi, shown, levels=24, cmap="viridis")
    fig.colorbar(cs, ax=ax, label=r"$\alpha/\beta$")
    ax.set_xlabel("$K/J$")
    ax.set_ylabel(r"$\phi/\pi$")
    fig.tight_layout()
    _save(fig, path, metadata)


def phase_figure(diagram, path, metadata=""):
    """Trapped/untrapped map of a PhaseDiagram."""
    fig = _figure()
    ax = fig.add_subplot()
    x = diagram.x_axis.points()
    y = diagram.y_axis.points()
    xlabel = diagram.x_axis.name
    if xlabel == "phi":
        x = x / np.pi
        xlabel = "phi/pi"
    ax.pcolormesh(x, y, diagram.trapped.T.astype(float), shading="nearest", cmap="Greys", vmin=0, vmax=1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(diagram.y_axis.name)
    ax.set_title("trapped (dark) / untrapped (light)", fontsize=9)
    fig.tight_layout()
    _save(fig, path, metadata)


def scan_figure(scan, threshold, path, metadata=""):
    """<x_c> along U with the classification threshold."""
    fig = _figure(6.0, 3.5)
    ax = fig.add_subplot()
    ax.plot(scan.u_values, scan.average_xc, ".-", lw=0.8)
    ax.axhline(threshold, color="#c0392b", ls="--", lw=0.8)
    ax.set_xlabel("$U/J$")
    ax.set_ylabel(r"$\langle x_c \rangle$")
    fig.tight_layout()
    _save(fig, path, metadata)
