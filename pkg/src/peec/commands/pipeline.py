"""Shared command plumbing: config to solver inputs, plans, error exits."""

from dataclasses import dataclass
from pathlib import Path
from typing import NoReturn

import numpy as np
import typer
from rich.console import Console

from peec.context import AppContext
from peec.errors import ConfigError, NumericError, PEECError
from peec.models.config import RunConfig
from peec.models.game import GameSpec
from peec.models.plan import ObservationPlan
from peec.models.solution import CESolution
from peec.services.ce_solver import solve_ce_game
from peec.services.lqg import GramianCache, RiccatiSolution, TimeGrid, solve_riccati_finite
from peec.services.noise import PhiloxNoiseSource
from peec.services.writer import ResultWriter

console = Console()
err_console = Console(stderr=True)


def exit_code(error: PEECError) -> int:
    if isinstance(error, ConfigError):
        return 2
    if isinstance(error, NumericError):
        return 3
    return 1


def fail(error: PEECError) -> NoReturn:
    """Report an error on stderr and exit with its code."""
    err_console.print(f"[red]Error:[/red] {error}")
    raise typer.Exit(exit_code(error))


def app_context(ctx: typer.Context) -> AppContext:
    if isinstance(ctx.obj, AppContext):
        return ctx.obj
    return AppContext(noise_factory=PhiloxNoiseSource, writer=ResultWriter())


@dataclass(frozen=True, eq=False)
class Problem:
    """A loaded configuration with its Riccati solution and Gramian cache."""

    config: RunConfig
    spec: GameSpec
    riccati: RiccatiSolution
    cache: GramianCache


def load_problem(context: AppContext, config_path: Path, op: float | None = None) -> Problem:
    path = context.resolve(config_path)
    console.print(f"[dim]Loading config from {path}...[/dim]")
    config = RunConfig.load(path)
    spec = config.game if op is None else config.game.with_updates(Op=op)

    console.print(f"[dim]Solving Riccati equation on {config.numerics.riccati_steps} steps...[/dim]")
    grid = TimeGrid(spec.T, config.numerics.riccati_steps)
    riccati = solve_riccati_finite(spec, grid)
    return Problem(config=config, spec=spec, riccati=riccati, cache=GramianCache(spec, grid))


def solve(problem: Problem) -> CESolution:
    console.print("[dim]Solving the observation game...[/dim]")
    return solve_ce_game(problem.spec, problem.cache, problem.riccati, eps=problem.config.numerics.eps)


def resolve_plans(problem: Problem) -> tuple[ObservationPlan, ObservationPlan]:
    """Plans from the experiment section, solving the game when no pursuer plan is given.

    A free observation price is simulated by observing at every simulation node.
    """
    horizon = problem.spec.T
    experiment = problem.config.experiment
    plan_e = ObservationPlan.from_instants(experiment.evader_instants, horizon)
    if experiment.pursuer_instants is not None:
        return ObservationPlan.from_instants(experiment.pursuer_instants, horizon), plan_e

    solution = solve(problem)
    if solution.observe_always:
        console.print("[yellow]⚠[/yellow] Observation is free; observing at every simulation node")
        steps = problem.config.numerics.sim_steps
        nodes = np.linspace(0.0, horizon, steps + 1)[1:-1]
        return ObservationPlan.from_instants(nodes.tolist(), horizon), plan_e
    return solution.pursuer_plan, plan_e


def describe(plan: ObservationPlan) -> str:
    if plan.N == 0:
        return "no observations"
    return "{" + ", ".join(f"{t:.2f}" for t in plan.instants) + "}"
