"""Figure rendering for hmimo harness CSV outputs."""

__version__ = "0.1.0"

from .render import KINDS, PlotSpec, SchemaMismatchError, build_figure, render_figure

__all__ = ["KINDS", "PlotSpec", "SchemaMismatchError", "build_figure",
           "render_figure", "__version__"]
