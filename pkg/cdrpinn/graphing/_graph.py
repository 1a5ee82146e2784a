from abc import ABC, abstractmethod

import matplotlib.pyplot as plt

from ..globals import DEFAULT_SIZE
from ..style import use_style


class Graph(ABC):
    """Base of every plot written into a run directory

    Options:
        out (str): SVG path used by `save()` when none is passed
        style (str, Cycler): see `cdrpinn.style`
        title (str): axes title
    """

    def __init__(self, **kwargs):
        self.out = kwargs.get("out")
        self.style = kwargs.get("style", "color_a")
        self.title = kwargs.get("title")

    def save(self, out: str = None) -> str:
        """Draw on a fresh figure and write it as SVG"""
        out = out or self.out
        with use_style(self.style):
            fig, ax = plt.subplots(figsize=DEFAULT_SIZE)
            try:
                self._graph(ax)
                if self.title:
                    ax.set_title(self.title)
                fig.tight_layout()
                fig.savefig(out, format="svg")
            finally:
                plt.close(fig)
        return out

    @abstractmethod
    def _graph(self, ax):
        pass
