"""Data models for chebydual."""
