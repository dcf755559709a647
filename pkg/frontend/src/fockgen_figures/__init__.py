"""Figure rendering for fockgen CSV outputs."""

from .render import FigureSpecError, load_table, render

__all__ = ["FigureSpecError", "load_table", "render"]
