"""Period command implementation."""

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from peec.commands.pipeline import app_context, console, fail
from peec.errors import PEECError
from peec.models.config import RunConfig
from peec.models.game import classify_dominance
from peec.models.plan import ObservationPlan
from peec.services.analysis import closed_loop_eigs
from peec.services.ce_solver import periodic_period, periodic_plan
from peec.services.engine import monte_carlo
from peec.services.lqg import RiccatiSolution, TimeGrid, solve_riccati_algebraic


def period(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Path to the run configuration (JSON or YAML)."),
    output: Path = typer.Option(
        Path("period.json"),
        "--output",
        "-o",
        help="Where to write the periodic solution JSON.",
    ),
    op: Optional[float] = typer.Option(
        None,
        "--op",
        help="Override the pursuer's observation price.",
    ),
    simulate: bool = typer.Option(
        False,
        "--simulate",
        help="Also simulate the periodic schedule over many cycles.",
    ),
    horizon_cycles: int = typer.Option(
        20,
        "--horizon-cycles",
        min=1,
        help="Number of periods to simulate with --simulate.",
    ),
    summary: Path = typer.Option(
        Path("period_summary.json"),
        "--summary",
        help="Where to write the Monte Carlo summary with --simulate.",
    ),
) -> None:
    """Find the optimal sampling period of the infinite-horizon game."""
    try:
        _period_impl(
            ctx,
            config_path,
            output,
            op=op,
            simulate=simulate,
            horizon_cycles=horizon_cycles,
            summary=summary,
        )
    except PEECError as e:
        fail(e)


def _period_impl(
    ctx: typer.Context,
    config_path: Path,
    output: Path,
    op: float | None,
    simulate: bool,
    horizon_cycles: int,
    summary: Path,
) -> None:
    """Implementation of period command."""
    context = app_context(ctx)
    path = context.resolve(config_path)
    console.print(f"[dim]Loading config from {path}...[/dim]")
    config = RunConfig.load(path)
    spec = config.game if op is None else config.game.with_updates(Op=op)

    console.print("[dim]Solving the algebraic Riccati equation...[/dim]")
    K_inf = solve_riccati_algebraic(spec)
    solution = periodic_period(spec, K_inf, spec.Op)
    stability = closed_loop_eigs(spec, K_inf, solution.dT_star)
    console.print(f"  dT* = {solution.dT_star:.6g} (average cost {solution.avg_cost:.6g})")
    if stability.hurwitz:
        console.print(f"[green]✓[/green] Closed loop is Hurwitz (max Re {stability.max_real_part:.3g})")
    else:
        console.print(f"[yellow]⚠[/yellow] Closed loop is not Hurwitz (max Re {stability.max_real_part:.3g})")

    target = context.resolve(output)
    context.writer.export_solution_json(solution, target)
    console.print(f"[green]✓[/green] Wrote {target}")

    if not simulate:
        return

    horizon = horizon_cycles * solution.dT_star
    long_run = spec.with_updates(T=horizon)
    grid = TimeGrid(horizon, config.numerics.riccati_steps)
    riccati = RiccatiSolution.stationary(K_inf, grid, classify_dominance(long_run).gap)
    plan = periodic_plan(solution.dT_star, horizon)
    seed = config.numerics.seed

    M = config.experiment.monte_carlo_paths
    console.print(f"[dim]Simulating {M} paths over {horizon_cycles} periods...[/dim]")
    result = monte_carlo(
        long_run,
        riccati,
        plan,
        ObservationPlan.empty(),
        M,
        seed,
        n_sim_steps=config.numerics.sim_steps,
        noise=context.noise_factory(seed),
    )
    start, end = result.mean_sq_norm[0], result.mean_sq_norm[-1]
    ratio = float(end / start) if start > 0 else float(np.inf)
    console.print(f"  mean |x|^2 went from {start:.6g} to {end:.6g} (ratio {ratio:.3g})")

    written = context.resolve(summary)
    context.writer.export_summary_json(result, written)
    console.print(f"[green]✓[/green] Wrote {written}")
