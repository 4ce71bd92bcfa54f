"""Unit type error detection for a small C-like language."""

from unitlint.units import ANY, Frame, UnitType, parse_unit_string, format_unit

__version__ = "0.1.0"

__all__ = ["ANY", "Frame", "UnitType", "parse_unit_string", "format_unit", "__version__"]
