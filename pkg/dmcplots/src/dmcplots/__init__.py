"""Figure rendering for dmclearn CSV outputs."""

from .render import FigureJob, MissingColumnError, render

__version__ = "0.1.0"

__all__ = ["FigureJob", "MissingColumnError", "render", "__version__"]
