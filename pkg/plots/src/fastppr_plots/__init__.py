"""Figure rendering for benchmark CSV outputs."""

from .render import FigureSpec, MissingColumn, build_figure, main, render

__all__ = ["FigureSpec", "MissingColumn", "build_figure", "main", "render"]
