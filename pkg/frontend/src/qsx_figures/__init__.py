"""Renderer for qsx figure-data documents: 2-simplex balls, geodesics, markers.

This package does no geometry computation: all mathematical content comes
from the primary package's ``figure-data`` JSON; the renderer only projects
coordinates through explicit affine maps and draws.
"""

__version__ = "0.1.0"

from .document import FigureDocument, Marker, Polyline, SchemaError, load_document
from .projection import PROJECTIONS, project
from .render import render_png, render_svg
