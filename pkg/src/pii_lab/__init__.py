"""Numerical laboratory for singular solutions of inhomogeneous Painleve II."""

from __future__ import annotations

__version__ = "0.1.0"
