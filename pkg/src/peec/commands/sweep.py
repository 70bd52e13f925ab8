"""Sweep command implementation."""

import math
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from peec.commands.pipeline import app_context, console, describe, fail, load_problem
from peec.errors import ConfigSchemaError, PEECError
from peec.models.config import INF_TOKENS, PRICE_PARAMS, SWEEP_PARAMS, Sweep
from peec.models.game import GameSpec
from peec.services.ce_solver import solve_ce_game
from peec.services.lqg import GramianCache, solve_riccati_finite


def sweep(
    ctx: typer.Context,
    config_path: Path = typer.Argument(..., help="Path to the run configuration (JSON or YAML)."),
    param: Optional[str] = typer.Option(
        None,
        "--param",
        "-p",
        help="Axis to sweep (Op, Oe, c or gamma). Defaults to the configured sweep.",
    ),
    values: Optional[str] = typer.Option(
        None,
        "--values",
        help="Comma-separated values, e.g. 10,900,inf.",
    ),
    output_dir: Optional[Path] = typer.Option(
        None,
        "--output-dir",
        "-o",
        help="Write one solution JSON per value into this directory.",
    ),
) -> None:
    """Solve the observation game over several prices, noise levels or control weights."""
    try:
        _sweep_impl(ctx, config_path, param, values, output_dir)
    except PEECError as e:
        fail(e)


def parse_values(text: str) -> tuple[float, ...]:
    """Parse a comma-separated list of values; inf tokens are accepted.

    Raises:
        ConfigSchemaError: If an entry is not a number.
    """
    parsed: list[float] = []
    for token in (part.strip() for part in text.split(",")):
        if not token:
            continue
        if token.lower() in INF_TOKENS:
            parsed.append(math.inf)
            continue
        try:
            parsed.append(float(token))
        except ValueError:
            raise ConfigSchemaError("--values", f"not a number: {token!r}")
    if not parsed:
        raise ConfigSchemaError("--values", "no values given")
    return tuple(parsed)


def _resolve_sweep(configured: Sweep | None, param: str | None, values: str | None) -> Sweep:
    name = param or (configured.param if configured else None)
    if name is None:
        raise ConfigSchemaError("--param", "no sweep parameter given or configured")
    if name not in SWEEP_PARAMS:
        raise ConfigSchemaError("--param", f"must be one of {', '.join(SWEEP_PARAMS)}, got {name!r}")
    if values is not None:
        resolved = Sweep(param=name, values=parse_values(values))
    elif configured is None:
        raise ConfigSchemaError("--values", "no sweep values given or configured")
    else:
        resolved = Sweep(param=name, values=configured.values)
    if name not in PRICE_PARAMS and not all(math.isfinite(v) and v > 0.0 for v in resolved.values):
        raise ConfigSchemaError("--values", f"{name} values must be positive and finite")
    return resolved


def swept_spec(base: GameSpec, param: str, value: float) -> GameSpec:
    """The game with one sweep axis set.

    ``c`` scales the configured noise matrix and ``gamma`` sets ``Rp = gamma * Re``.
    """
    if param == "c":
        return base.with_updates(C=value * base.C)
    if param == "gamma":
        return base.with_updates(Rp=value * base.Re)
    return base.with_updates(**{param: value})


def _sweep_impl(
    ctx: typer.Context,
    config_path: Path,
    param: str | None,
    values: str | None,
    output_dir: Path | None,
) -> None:
    """Implementation of sweep command."""
    context = app_context(ctx)
    problem = load_problem(context, config_path)
    plan = _resolve_sweep(problem.config.experiment.sweep, param, values)

    table = Table(title=f"Sweep over {plan.param}")
    table.add_column(plan.param, justify="right")
    table.add_column("N_p*", justify="right")
    table.add_column("objective", justify="right")
    table.add_column("bound", justify="right")
    table.add_column("instants")

    for value in plan.values:
        spec = swept_spec(problem.spec, plan.param, value)
        riccati, cache = problem.riccati, problem.cache
        # prices leave the Riccati solution and Gramians unchanged
        if plan.param not in PRICE_PARAMS:
            grid = problem.riccati.grid
            riccati, cache = solve_riccati_finite(spec, grid), GramianCache(spec, grid)
        console.print(f"[dim]Solving with {plan.param} = {value:g}...[/dim]")
        solution = solve_ce_game(spec, cache, riccati, eps=problem.config.numerics.eps)
        table.add_row(
            f"{value:g}",
            str(solution.pursuer_plan.N),
            f"{solution.objective:.6g}",
            str(solution.N_upper_tight),
            solution.reason or describe(solution.pursuer_plan),
        )
        if output_dir is not None:
            target = context.resolve(output_dir) / f"solution_{plan.param}_{value:g}.json"
            context.writer.export_solution_json(solution, target)

    console.print(table)
    if output_dir is not None:
        console.print(f"[green]✓[/green] Wrote {len(plan.values)} solutions to {context.resolve(output_dir)}")
