"""Exact invariants of norm-flow systems over small number fields."""

__version__ = "0.1.0"
