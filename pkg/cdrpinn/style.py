"""Plot styles

Palettes come from colorbrewer2 and survive grey-scale printing. A style is
named "T_C": T is color or line, C picks the palette ("color_a", "line_a").
Graphs switch to their style only while they draw, via `use_style`.
"""
from contextlib import contextmanager

import matplotlib as mpl
from cycler import Cycler, cycler

mpl.use("Agg")

PALETTES = dict(
    a=["#762a83", "#1b7837", "#af8dc3", "#7fbf7b"],
    b=["#1b9e77", "#d95f02", "#7570b3", "#e7298a"],
)

DASHES = dict(a=["-", "--", "-.", ":"])

HEATMAP_CMAP = "PRGn"

RC = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "legend.frameon": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.fonttype": "none",
}


def style_cycler(style="color_a") -> Cycler:
    """Property cycle of a style name, or `style` itself when it is a cycler"""
    if isinstance(style, Cycler):
        return style
    kind, palette = style.split("_")
    if kind == "line":
        dashes = DASHES[palette]
        return cycler(color=["#000000"] * len(dashes), linestyle=dashes)
    return cycler(color=PALETTES[palette])


@contextmanager
def use_style(style="color_a"):
    with mpl.rc_context({**RC, "axes.prop_cycle": style_cycler(style)}):
        yield
