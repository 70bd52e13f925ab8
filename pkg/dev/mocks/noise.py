"""Mock noise sources for testing."""

import numpy as np
from numpy.typing import NDArray


class MockNoiseSource:
    """Mock implementation of NoiseSourceProtocol for testing.

    Returns a constant ``level`` (zero by default, which makes every path the
    deterministic mean path) and records the requested paths.
    """

    def __init__(self, seed: int = 0, level: float = 0.0) -> None:
        """Initialize mock source with an empty request history."""
        self.seed = seed
        self.level = level
        self.scripted: dict[int, NDArray[np.float64]] = {}
        self.requests: list[tuple[int, int, int]] = []

    def script(self, path_index: int, draws: NDArray[np.float64]) -> None:
        """Serve fixed draws for one path.

        Args:
            path_index: Path the draws belong to.
            draws: Array of shape (n_steps, dim).
        """
        self.scripted[path_index] = np.asarray(draws, dtype=np.float64)

    def increments(self, path_index: int, n_steps: int, dim: int) -> NDArray[np.float64]:
        self.requests.append((path_index, n_steps, dim))
        if path_index in self.scripted:
            draws = self.scripted[path_index]
            if draws.shape != (n_steps, dim):
                raise ValueError(f"scripted draws for path {path_index} have shape {draws.shape}")
            return draws
        return np.full((n_steps, dim), self.level)
