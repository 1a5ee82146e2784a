import numpy as np

from ._graph import Graph


class Line:
    """One series of a `LineGraph`

    Arguments:
        frame (DataFrame): data holding both columns
        value (str): column plotted on the y axis
        x (str): column plotted on the x axis

    Optional:
        label (str): legend entry, default the column name
        style (str): matplotlib line style

    Examples:
        >>> log = pd.read_csv("loss_history.csv")
        >>> Line(log, "L_phys_w", x="t", label="weighted")
    """

    def __init__(self, frame, value: str, x: str, label: str = None, style="-"):
        assert x in frame.columns, "x column '{}' missing".format(x)
        self.frame = frame
        self.value = value
        self.x = x
        self.label = label if label else value
        self.style = style

    def get_data(self):
        data = self.frame[[self.x, self.value]].dropna()
        return data[self.x].to_numpy(), data[self.value].to_numpy()


class LineGraph(Graph):
    """Line graph over one or more `Line`s

    Args:
        lines (List[Line]): series to draw
        log (bool, optional): logarithmic y axis, non-positive values dropped
        xlabel, ylabel (str, optional): axis labels
        kwargs: see `Graph`
    """

    def __init__(self, lines, **kwargs):
        super().__init__(**kwargs)

        default_options = dict(
            log=False,
            xlabel=None,
            ylabel=None,
        )

        for prop, default in default_options.items():
            setattr(self, prop, kwargs.get(prop, default))

        self.lines = lines

    def _graph(self, ax):
        for line in self.lines:
            x, y = line.get_data()
            if self.log:
                keep = np.isfinite(y) & (y > 0)
                x, y = x[keep], y[keep]
            ax.plot(x, y, linestyle=line.style, label=line.label)
        if self.log:
            ax.set_yscale("log")
        if self.xlabel:
            ax.set_xlabel(self.xlabel)
        if self.ylabel:
            ax.set_ylabel(self.ylabel)
        if len(self.lines) > 1:
            ax.legend()
