"""Graphing Primitives Module"""

from ._custom import CustomGraph, heatmap
from ._linegraph import Line, LineGraph
from ._plots import plot_loss_history, plot_prediction

__all__ = [
    "CustomGraph",
    "heatmap",
    "Line",
    "LineGraph",
    "plot_loss_history",
    "plot_prediction",
]
