"""Maker-Breaker directed-triangle games on tournaments."""

__version__ = "0.1.0"
