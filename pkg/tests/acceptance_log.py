"""Shared store for the one-line acceptance summaries."""

LINES: dict[int, str] = {}
