"""Figure rendering for simulator CSV outputs."""

from .common import KINDS, EmptyDataError, PlotSpec, SchemaError

__all__ = ["KINDS", "EmptyDataError", "PlotSpec", "SchemaError"]
__version__ = "0.1.0"
