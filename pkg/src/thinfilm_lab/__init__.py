"""Numerical laboratory for blow-up in a fourth-order nonlocal thin-film equation."""

__version__ = "0.1.0"
