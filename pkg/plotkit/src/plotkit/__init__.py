from .render import PlotInputError, PlotSpec, compute_series, render

__all__ = ["PlotSpec", "PlotInputError", "compute_series", "render"]
__version__ = "0.1.0"
