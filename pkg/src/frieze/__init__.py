"""Frieze patterns on marked surfaces with exact arithmetic."""

__version__ = "0.1.0"
