"""Numerical laboratory for central values and low-lying zeros of two L-function families."""

__version__ = "0.1.0"

CODE_VERSION = __version__
