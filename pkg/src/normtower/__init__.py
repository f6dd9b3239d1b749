"""Normaliser towers, automorphism towers and their finite-stage constructions."""

__version__ = "0.1.0"
