"""Monotone modal and conditional logic on finite frames, in single-type and multi-type form."""

__version__ = "0.1.0"
