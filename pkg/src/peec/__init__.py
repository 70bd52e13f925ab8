"""PEEC - pursuit-evasion games with costly, exposing observations."""

__version__ = "0.1.0"
