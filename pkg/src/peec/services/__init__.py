"""PEEC services."""

from peec.services.noise import PhiloxNoiseSource
from peec.services.writer import ResultWriter

__all__ = ["PhiloxNoiseSource", "ResultWriter"]
