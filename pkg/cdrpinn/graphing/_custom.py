from ._graph import Graph
from ..style import HEATMAP_CMAP


class CustomGraph(Graph):
    """Graph drawn by a user function `func(ax, data)`"""

    def __init__(self, data, func, **kwargs):
        super().__init__(**kwargs)
        self.data = data
        self.func = func

    def _graph(self, ax):
        self.func(ax, self.data)


def heatmap(x: str, y: str, value: str, cmap=HEATMAP_CMAP):
    """Scatter-heatmap drawer for grid frames; masked cells simply have no points"""

    def draw(ax, frame):
        mappable = ax.scatter(
            frame[x], frame[y], c=frame[value], cmap=cmap, marker="s", s=4, linewidths=0
        )
        ax.set_xlabel(x)
        ax.set_ylabel(y)
        ax.set_aspect("equal")
        ax.figure.colorbar(mappable, ax=ax, label=value)

    return draw
