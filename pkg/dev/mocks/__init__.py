"""Mock implementations for testing."""

from dev.mocks.noise import MockNoiseSource

__all__ = ["MockNoiseSource"]
