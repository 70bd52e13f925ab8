"""Four-panel SVG figure of one simulated path."""

import io
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from peec.errors import OutputError, UnsupportedLayoutError
from peec.models.trajectory import TrajectoryRecord

# Planar positions (y1, y2) in the (y1, v1, y2, v2) ordering.
DEFAULT_POSITIONS = {4: (0, 2)}
SVG_SALT = "peec"


@dataclass(frozen=True)
class PlotStyle:
    """Figure options; ``position_indices`` locate the planar position components."""

    position_indices: tuple[int, int] | None = None
    title: str | None = None
    width: float = 10.0
    height: float = 8.0


def _positions(traj: TrajectoryRecord, style: PlotStyle) -> tuple[int, int]:
    n = traj.n
    indices = style.position_indices or DEFAULT_POSITIONS.get(n)
    if indices is None or max(indices) >= n or min(indices) < 0:
        raise UnsupportedLayoutError(n)
    return indices


def build_figure(traj: TrajectoryRecord, style: PlotStyle | None = None) -> Figure:
    """Panels: (a) relative position plane, (b) relative position vs t,
    (c) estimation error norm, (d) relative distance; observations marked."""
    style = style or PlotStyle()
    i, j = _positions(traj, style)
    t = traj.times
    obs = traj.obs_flags
    pos = traj.x[:, [i, j]]
    pos_hat = traj.x_hat[:, [i, j]]
    error = np.linalg.norm(traj.x - traj.x_hat, axis=1)
    distance = np.linalg.norm(pos, axis=1)

    fig = Figure(figsize=(style.width, style.height))
    ax_plane, ax_rel, ax_err, ax_dist = fig.subplots(2, 2).ravel()

    ax_plane.plot(pos[:, 0], pos[:, 1], color="tab:red", label="state")
    ax_plane.plot(pos_hat[:, 0], pos_hat[:, 1], color="tab:blue", linestyle="--", label="estimate")
    ax_plane.scatter(pos[:1, 0], pos[:1, 1], color="black", marker="s", zorder=3, label="start")
    if obs.any():
        ax_plane.scatter(pos[obs, 0], pos[obs, 1], color="tab:green", marker="o", zorder=3, label="observation")
    ax_plane.set_xlabel("relative y1")
    ax_plane.set_ylabel("relative y2")
    ax_plane.set_title("(a) relative position plane")
    ax_plane.legend(loc="best", fontsize="small")

    ax_rel.plot(t, pos[:, 0], label="y1")
    ax_rel.plot(t, pos[:, 1], label="y2")
    ax_rel.set_xlabel("t")
    ax_rel.set_title("(b) relative position")
    ax_rel.legend(loc="best", fontsize="small")

    ax_err.plot(t, error, color="tab:purple")
    ax_err.set_xlabel("t")
    ax_err.set_title("(c) estimation error norm")

    ax_dist.plot(t, distance, color="tab:orange")
    ax_dist.set_xlabel("t")
    ax_dist.set_title("(d) relative distance")

    for ax in (ax_rel, ax_err, ax_dist):
        for instant in t[obs]:
            ax.axvline(instant, color="tab:green", linestyle=":", linewidth=0.8)

    if style.title:
        fig.suptitle(style.title)
    fig.tight_layout()
    return fig


def emit_plot_svg(traj: TrajectoryRecord, style: PlotStyle | None = None) -> str:
    """Render the figure as an SVG document; identical inputs give identical text.

    Raises:
        UnsupportedLayoutError: If the planar positions cannot be located.
    """
    fig = build_figure(traj, style)
    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "path"}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def save_plot_svg(traj: TrajectoryRecord, path: Path, style: PlotStyle | None = None) -> None:
    """Write the SVG figure to ``path``."""
    document = emit_plot_svg(traj, style)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document, encoding="utf-8")
    except OSError as e:
        raise OutputError(str(path), e.strerror or str(e))
