"""Verification toolkit for choreographies and behavioural contracts."""

__version__ = "0.1.0"
