"""Report and CSV formatters."""
