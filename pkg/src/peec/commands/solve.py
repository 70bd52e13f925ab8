"""Solve command implementation."""

from pathlib import Path
from typing import Optional

import typer

from peec.commands.pipeline import app_context, console, describe, fail, load_problem, solve as solve_game
from peec.errors import PEECError


def solve(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Path to the run configuration (JSON or YAML)."),
    output: Path = typer.Option(
        Path("solution.json"),
        "--output",
        "-o",
        help="Where to write the solution JSON.",
    ),
    op: Optional[float] = typer.Option(
        None,
        "--op",
        help="Override the pursuer's observation price (accepts inf).",
    ),
) -> None:
    """Solve the observation game and write the equilibrium schedules."""
    try:
        _solve_impl(ctx, config_path, output, op)
    except PEECError as e:
        fail(e)


def _solve_impl(ctx: typer.Context, config_path: Path, output: Path, op: float | None) -> None:
    """Implementation of solve command."""
    context = app_context(ctx)
    problem = load_problem(context, config_path, op)
    solution = solve_game(problem)

    if solution.reason:
        console.print(f"[yellow]⚠[/yellow] {solution.reason}")
    console.print(
        f"  N_p* = {solution.pursuer_plan.N} at {describe(solution.pursuer_plan)} "
        f"(objective {solution.objective:.6g}, bound {solution.N_upper_tight})"
    )

    target = context.resolve(output)
    digest = context.writer.export_solution_json(solution, target)
    console.print(f"[green]✓[/green] Wrote {target} [dim](sha256 {digest[:12]})[/dim]")
