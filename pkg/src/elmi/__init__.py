"""Interactive song-signing translation workbench."""

__version__ = "0.1.0"
