"""Per-run plots: loss history and prediction"""
import numpy as np

from ._custom import CustomGraph, heatmap
from ._linegraph import Line, LineGraph


def plot_loss_history(log_frame, out: str) -> str:
    """Weighted, raw and boundary losses with beta, log scale"""
    lines = [
        Line(log_frame, "L_phys_w", x="t", label="L_phys (weighted)"),
        Line(log_frame, "L_phys_raw", x="t", label="L_phys (raw)", style="--"),
        Line(log_frame, "L_bc", x="t", label="L_bc", style="-."),
    ]
    if np.isfinite(log_frame["beta"]).any():
        lines.append(Line(log_frame, "beta", x="t", label="beta", style=":"))
    return LineGraph(lines, log=True, xlabel="iteration", ylabel="loss", out=out).save()


def _line_prediction(ax, frame):
    ax.plot(frame["x1"], frame["u_pred"], "-", label="prediction")
    if "u_exact" in frame:
        ax.plot(frame["x1"], frame["u_exact"], "--", label="exact")
        ax.legend()
    ax.set_xlabel("x1")
    ax.set_ylabel("u")


def plot_prediction(grid_frame, dim: int, out: str) -> str:
    """1D line, 2D heatmap, 3D heatmap of the slice nearest x3 = 0.5"""
    if dim == 1:
        return CustomGraph(grid_frame, _line_prediction, out=out).save()
    frame = grid_frame
    if dim == 3:
        levels = frame["x3"].unique()
        middle = levels[np.argmin(np.abs(levels - 0.5))]
        frame = frame[frame["x3"] == middle]
    return CustomGraph(frame, heatmap("x1", "x2", "u_pred"), out=out).save()
