"""Inference of sufficient representation invariants for modules over an abstract type."""

__version__ = "0.1.0"
