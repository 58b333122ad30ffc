"""Numerical laboratory for the nonlocal Cahn-Hilliard equation with reaction."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
