"""Version information for poncelet-bundles."""

__version__ = "0.4.0"
