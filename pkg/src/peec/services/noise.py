"""Counter-based Gaussian noise source."""

import numpy as np
from numpy.typing import NDArray


class PhiloxNoiseSource:
    """Wiener increments from a Philox generator keyed by (seed, path index).

    Philox is counter-based, so path k is reproducible on its own and the
    draws of a Monte Carlo run do not depend on batch size or ordering.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed

    def generator(self, path_index: int) -> np.random.Generator:
        sequence = np.random.SeedSequence([self.seed, path_index])
        return np.random.Generator(np.random.Philox(sequence))

    def increments(self, path_index: int, n_steps: int, dim: int) -> NDArray[np.float64]:
        """Standard normals of shape (n_steps, dim), drawn in step order."""
        draws: NDArray[np.float64] = self.generator(path_index).standard_normal((n_steps, dim))
        return draws
