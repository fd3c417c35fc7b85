"""Exact tools for elementary generators, shortcuts and reduction theory in Sp(2p; Z)."""

__version__ = "0.1.0"
