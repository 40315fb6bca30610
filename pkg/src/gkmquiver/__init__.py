"""GKM structures on quiver Grassmannians of string and forest representations."""

__version__ = "0.1.0"
