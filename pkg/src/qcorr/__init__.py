"""Entanglement and measurement-induced nonlocality of two-qubit states under local noise."""

__version__ = "0.1.0"
