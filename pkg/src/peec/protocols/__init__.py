"""PEEC protocols."""

from peec.protocols.noise import NoiseSourceProtocol
from peec.protocols.writer import ResultWriterProtocol

__all__ = ["NoiseSourceProtocol", "ResultWriterProtocol"]
