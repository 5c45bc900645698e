"""Batch analytics for geotagged crisis-related microblog dumps."""

__version__ = "0.1.0"
