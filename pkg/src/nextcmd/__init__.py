"""Next-command prediction from IDE event streams."""

__version__ = "0.1.0"
