"""SVG overlays of curves, projected to a flat picture of each space form."""
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "curveflow"


def project(c):
    """Planar picture: polar for K=0, Poincare disk for K=-1, orthographic from the pole for K=+1."""
    if c.sf.K == 0:
        radius = c.rho
    elif c.sf.K == -1:
        radius = np.tanh(c.rho / 2)
    else:
        radius = np.sin(c.rho)
    theta = np.append(c.theta, 0.0)
    radius = np.append(radius, radius[0])
    return radius * np.cos(theta), radius * np.sin(theta)


def overlay_svg(path, curves, labels=None, title=None):
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 6))
    if curves and curves[0].sf.K != 0:
        boundary = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(boundary), np.sin(boundary), color="0.7", lw=0.8)
    colors = plt.cm.viridis(np.linspace(0, 1, max(len(curves), 2)))
    for i, c in enumerate(curves):
        x, y = project(c)
        ax.plot(x, y, color=colors[i], lw=1.2, label=labels[i] if labels else None)
    ax.plot([0], [0], marker="+", color="k")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(loc="upper right", fontsize=8)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("wrote %s", path)
    return path


def trace_overlay(path, trace, count=5):
    """Initial, a few intermediate and the final snapshot of a run."""
    snapshots = trace.snapshots
    picks = sorted(set(np.linspace(0, len(snapshots) - 1, min(count, len(snapshots))).round().astype(int)))
    curves = [snapshots[i][1] for i in picks]
    labels = [f"t = {snapshots[i][0]:.4g}" for i in picks]
    return overlay_svg(path, curves, labels, title=f"{trace.law.label}, K={trace.initial.sf.K}")
