"""Agent-based simulator of firms financed by a single bank."""

__version__ = "0.1.0"
