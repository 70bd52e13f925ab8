"""Deterministic result files: solution JSON, summary JSON, trajectory CSV."""

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from peec.errors import OutputError
from peec.models.solution import CESolution, PeriodicSolution
from peec.models.trajectory import MonteCarloSummary, TrajectoryRecord

CSV_FORMAT = "%.12g"
DISPLAY_FORMAT = "%.2f"


def _finite_or_token(value: float) -> float | str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def solution_to_dict(solution: CESolution | PeriodicSolution) -> dict[str, Any]:
    """JSON-ready mapping with a fixed key order."""
    if isinstance(solution, PeriodicSolution):
        return {
            "kind": "periodic",
            "Op": _finite_or_token(solution.Op),
            "dT_star": solution.dT_star,
            "dT_star_display": DISPLAY_FORMAT % solution.dT_star,
            "avg_cost": solution.avg_cost,
            "second_derivative": solution.second_derivative,
            "second_derivative_full": solution.second_derivative_full,
            "residual": solution.residual,
        }

    pursuer = solution.pursuer_plan
    evader = solution.evader_plan
    return {
        "kind": "ce_solution",
        "dominance": solution.dominance.value,
        "reason": solution.reason,
        "observe_always": solution.observe_always,
        "Np": pursuer.N,
        "instants": list(pursuer.instants),
        "instants_display": [DISPLAY_FORMAT % t for t in pursuer.instants],
        "Ne": evader.N,
        "evader_instants": list(evader.instants),
        "objective": _finite_or_token(solution.objective),
        "F_table": {str(k): _finite_or_token(v) for k, v in sorted(solution.F_table.items())},
        "N_upper": solution.N_upper,
        "N_upper_tight": solution.N_upper_tight,
        "first_order_residuals": list(solution.first_order_residuals),
        "fo_tol": solution.fo_tol,
    }


def summary_to_dict(summary: MonteCarloSummary, expected: float | None = None) -> dict[str, Any]:
    data: dict[str, Any] = {
        "kind": "monte_carlo",
        "M": summary.M,
        "mean_cost": summary.mean_cost,
        "std_cost": summary.std_cost,
        "ci95_halfwidth": summary.ci95_halfwidth,
        "mean_terminal_distance": summary.mean_terminal_distance,
        "expected_cost": expected,
        "ci95_ratio": None,
    }
    if expected is not None and summary.ci95_halfwidth > 0:
        data["ci95_ratio"] = abs(summary.mean_cost - expected) / summary.ci95_halfwidth
    return data


class ResultWriter:
    """Writer for byte-stable result files."""

    def export_solution_json(self, solution: CESolution | PeriodicSolution, path: Path) -> str:
        """Write a solver result as JSON.

        Instants are written at full precision, with a rounded display copy.

        Returns:
            SHA256 hash of the written file.

        Raises:
            OutputError: If the file cannot be written.
        """
        return self._write_json(solution_to_dict(solution), path)

    def export_summary_json(
        self, summary: MonteCarloSummary, path: Path, expected: float | None = None
    ) -> str:
        """Write Monte Carlo statistics, with the closed-form cost when given."""
        return self._write_json(summary_to_dict(summary, expected), path)

    def export_trajectory_csv(self, traj: TrajectoryRecord, path: Path) -> str:
        """Write one trajectory as CSV.

        Columns: t, x1..xn, xhat1..xhatn, up1.., ue1.., obs, cost_to_date with
        12 significant digits and LF line endings.

        Returns:
            SHA256 hash of the written file.

        Raises:
            OutputError: If the file cannot be written.
        """
        n = traj.x.shape[1]
        header = (
            ["t"]
            + [f"x{i + 1}" for i in range(n)]
            + [f"xhat{i + 1}" for i in range(n)]
            + [f"up{i + 1}" for i in range(traj.u_p.shape[1])]
            + [f"ue{i + 1}" for i in range(traj.u_e.shape[1])]
            + ["obs", "cost_to_date"]
        )
        numeric = np.column_stack((traj.times, traj.x, traj.x_hat, traj.u_p, traj.u_e))
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row, flag, cost in zip(numeric, traj.obs_flags, traj.cost_to_date):
                    writer.writerow([CSV_FORMAT % v for v in row] + ["1" if flag else "0", CSV_FORMAT % cost])
        except OSError as e:
            raise OutputError(str(path), e.strerror or str(e))
        return self.compute_hash(path)

    def _write_json(self, data: dict[str, Any], path: Path) -> str:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(str(path), e.strerror or str(e))
        return self.compute_hash(path)

    def compute_hash(self, file_path: Path) -> str:
        """Compute SHA256 hash of a file.

        Args:
            file_path: Path to file.

        Returns:
            SHA256 hex digest.
        """
        hasher = hashlib.sha256()
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(8192), b""):
                hasher.update(chunk)
        return hasher.hexdigest()
