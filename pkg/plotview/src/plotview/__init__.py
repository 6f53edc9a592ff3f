"""Render absorption/dispersion overlays from sweep CSV files.

This package never evaluates any physics: it is a pure consumer of the CSV
format written by the simulation CLI (columns axis_mhz, field, method,
branch, re, im). Absorption (Im) draws solid, dispersion (Re) dashed; one
panel per field; methods distinguished by color; gap rows break the lines.
"""

from .render import (
    EmptyDataError,
    MissingColumnError,
    PlotSpec,
    read_rows,
    render,
)

__version__ = "0.1.0"
__all__ = [
    "EmptyDataError",
    "MissingColumnError",
    "PlotSpec",
    "read_rows",
    "render",
    "__version__",
]
