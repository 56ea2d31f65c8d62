"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

LINES: list = []
