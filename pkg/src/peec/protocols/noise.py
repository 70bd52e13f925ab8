"""Noise source protocol definition."""

from typing import Protocol

import numpy as np
from numpy.typing import NDArray


class NoiseSourceProtocol(Protocol):
    """Protocol for per-path Wiener increments."""

    seed: int

    def increments(self, path_index: int, n_steps: int, dim: int) -> NDArray[np.float64]:
        """Standard normal draws for one path.

        Args:
            path_index: Index of the path within its run.
            n_steps: Number of simulation steps.
            dim: Dimension of the Wiener process.

        Returns:
            Array of shape (n_steps, dim); row k drives step k.

        Note:
            Draws for a path depend only on (seed, path_index), never on which
            other paths were generated before it.
        """
        ...
