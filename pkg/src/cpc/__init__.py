"""A calculational proof checker with a built-in proof kernel."""

__version__ = "0.1.0"
