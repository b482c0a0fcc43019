"""Problem construction and built-in test problems."""
