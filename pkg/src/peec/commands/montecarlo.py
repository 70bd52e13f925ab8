"""Monte Carlo command implementation."""

from pathlib import Path
from typing import Optional

import typer

from peec.commands.pipeline import app_context, console, describe, fail, load_problem, resolve_plans
from peec.errors import PEECError
from peec.services.analysis import expected_cost
from peec.services.engine import monte_carlo


def montecarlo(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Path to the run configuration (JSON or YAML)."),
    output: Path = typer.Option(
        Path("summary.json"),
        "--output",
        "-o",
        help="Where to write the summary JSON.",
    ),
    paths: Optional[int] = typer.Option(
        None,
        "--paths",
        "-M",
        min=2,
        help="Override the configured number of paths.",
    ),
    seed: Optional[int] = typer.Option(
        None,
        "--seed",
        "-s",
        help="Override the configured base seed.",
    ),
    op: Optional[float] = typer.Option(
        None,
        "--op",
        help="Override the pursuer's observation price (accepts inf).",
    ),
) -> None:
    """Estimate the expected cost by simulation and compare with the closed form."""
    try:
        _montecarlo_impl(ctx, config_path, output, paths=paths, seed=seed, op=op)
    except PEECError as e:
        fail(e)


def _montecarlo_impl(
    ctx: typer.Context,
    config_path: Path,
    output: Path,
    paths: int | None,
    seed: int | None,
    op: float | None,
) -> None:
    """Implementation of montecarlo command."""
    context = app_context(ctx)
    problem = load_problem(context, config_path, op)
    numerics = problem.config.numerics
    plan_p, plan_e = resolve_plans(problem)
    M = problem.config.experiment.monte_carlo_paths if paths is None else paths
    seed = numerics.seed if seed is None else seed

    console.print(f"[dim]Simulating {M} paths with pursuer observations {describe(plan_p)}...[/dim]")
    summary = monte_carlo(
        problem.spec,
        problem.riccati,
        plan_p,
        plan_e,
        M,
        seed,
        n_sim_steps=numerics.sim_steps,
        noise=context.noise_factory(seed),
    )
    expected = expected_cost(problem.spec, problem.cache, problem.riccati, plan_p, plan_e).total
    console.print(
        f"  mean cost {summary.mean_cost:.6g} ± {summary.ci95_halfwidth:.3g} (expected {expected:.6g})"
    )
    if summary.ci95_halfwidth > 0.0:
        ratio = abs(summary.mean_cost - expected) / summary.ci95_halfwidth
        console.print(f"  |difference| / ci95 = {ratio:.2f}")

    target = context.resolve(output)
    context.writer.export_summary_json(summary, target, expected=expected)
    console.print(f"[green]✓[/green] Wrote {target}")
