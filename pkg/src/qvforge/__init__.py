"""Quantum-volume transpiler and benchmark toolkit."""

__version__ = "0.1.0"
