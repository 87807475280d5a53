"""Publication-style figure rendering for CSV + manifest artifact
directories.  Consumes the artifacts as written; computes no physics."""

from .recipes import RECIPES, FigureRecipe, Panel, Series
from .render import RenderError, read_columns, render, verify_manifest

__version__ = "0.1.0"

__all__ = [
    "RECIPES",
    "FigureRecipe",
    "Panel",
    "Series",
    "RenderError",
    "read_columns",
    "render",
    "verify_manifest",
]
