"""Regime-atlas rendering for heatstruct CSV outputs."""

from .render import PlotSpec, SchemaError, load_profile, load_series, render

__all__ = ["PlotSpec", "SchemaError", "load_profile", "load_series", "render"]

__version__ = "0.1.0"
