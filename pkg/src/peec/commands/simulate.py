"""Simulate command implementation."""

from pathlib import Path
from typing import Optional

import typer

from peec.commands.pipeline import app_context, console, describe, fail, load_problem, resolve_plans
from peec.errors import PEECError
from peec.services.engine import simulate as simulate_path
from peec.services.plot import PlotStyle, save_plot_svg


def simulate(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Path to the run configuration (JSON or YAML)."),
    output: Path = typer.Option(
        Path("trajectory.csv"),
        "--output",
        "-o",
        help="Where to write the trajectory CSV.",
    ),
    svg: Optional[Path] = typer.Option(
        None,
        "--svg",
        help="Also render the trajectory figure to this SVG file.",
    ),
    seed: Optional[int] = typer.Option(
        None,
        "--seed",
        "-s",
        help="Override the configured noise seed.",
    ),
    op: Optional[float] = typer.Option(
        None,
        "--op",
        help="Override the pursuer's observation price (accepts inf).",
    ),
) -> None:
    """Simulate one closed-loop path under the configured or equilibrium plans."""
    try:
        _simulate_impl(ctx, config_path, output, svg=svg, seed=seed, op=op)
    except PEECError as e:
        fail(e)


def _simulate_impl(
    ctx: typer.Context,
    config_path: Path,
    output: Path,
    svg: Path | None,
    seed: int | None,
    op: float | None,
) -> None:
    """Implementation of simulate command."""
    context = app_context(ctx)
    problem = load_problem(context, config_path, op)
    numerics = problem.config.numerics
    plan_p, plan_e = resolve_plans(problem)
    seed = numerics.seed if seed is None else seed

    console.print(f"[dim]Simulating with pursuer observations {describe(plan_p)}...[/dim]")
    traj = simulate_path(
        problem.spec,
        problem.riccati,
        plan_p,
        plan_e,
        seed,
        n_sim_steps=numerics.sim_steps,
        noise=context.noise_factory(seed),
    )
    console.print(f"  realized cost {traj.realized_cost:.6g}")

    target = context.resolve(output)
    context.writer.export_trajectory_csv(traj, target)
    console.print(f"[green]✓[/green] Wrote {target}")

    if svg is not None:
        figure = context.resolve(svg)
        style = PlotStyle(position_indices=problem.config.experiment.position_indices)
        save_plot_svg(traj, figure, style)
        console.print(f"[green]✓[/green] Wrote {figure}")
