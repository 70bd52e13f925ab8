"""Result writer protocol definition."""

from pathlib import Path
from typing import Protocol

from peec.models.solution import CESolution, PeriodicSolution
from peec.models.trajectory import MonteCarloSummary, TrajectoryRecord


class ResultWriterProtocol(Protocol):
    """Protocol for deterministic result files."""

    def export_solution_json(self, solution: CESolution | PeriodicSolution, path: Path) -> str:
        """Write a solver result as JSON with a stable key order.

        Returns:
            SHA256 hash of the written file.
        """
        ...

    def export_summary_json(self, summary: MonteCarloSummary, path: Path, expected: float | None = None) -> str:
        """Write Monte Carlo statistics (and the closed-form cost, if given) as JSON.

        Returns:
            SHA256 hash of the written file.
        """
        ...

    def export_trajectory_csv(self, traj: TrajectoryRecord, path: Path) -> str:
        """Write one trajectory as CSV.

        Returns:
            SHA256 hash of the written file.
        """
        ...

    def compute_hash(self, file_path: Path) -> str:
        """Compute SHA256 hash of a file."""
        ...
