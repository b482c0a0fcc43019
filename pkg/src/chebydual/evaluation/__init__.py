"""Verification oracles and diagnostics."""
