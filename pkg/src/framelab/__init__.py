"""framelab: numerical differential geometry of adapted frame bundles."""

__version__ = "0.1.0"
