"""Typer CLI application entry point for PEEC."""

import logging
from collections.abc import Sequence
from importlib import metadata
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from peec.commands import montecarlo, period, simulate, solve, sweep
from peec.context import AppContext
from peec.services.noise import PhiloxNoiseSource
from peec.services.writer import ResultWriter

console = Console()


def get_safe_version(package_name: str, fallback: str = "0.1.0") -> str:
    """Safely get the version of a package.

    Args:
        package_name: Name of the package.
        fallback: Default version if retrieval fails.

    Returns:
        Version string.
    """
    try:
        return metadata.version(package_name)
    except metadata.PackageNotFoundError:
        return fallback


def version_callback(value: Optional[bool]) -> None:
    """Print version and exit."""
    if value:
        version = get_safe_version("peec")
        console.print(f"peec version: {version}")
        raise typer.Exit()


def configure_logging(verbose: bool) -> None:
    """Route the package's debug logs to stderr through rich."""
    logger = logging.getLogger("peec")
    if not verbose:
        logger.setLevel(logging.WARNING)
        return
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    logger.setLevel(logging.DEBUG)


app = typer.Typer(
    name="peec",
    help="PEEC - pursuit-evasion games where observing costs a price and exposes the observer.",
    no_args_is_help=True,
)


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-V",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit.",
    ),
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="Log solver progress to stderr.",
    ),
) -> None:
    """PEEC - observation schedules for LQG pursuit-evasion."""
    configure_logging(verbose)
    if ctx.obj is None:
        ctx.obj = AppContext(
            noise_factory=PhiloxNoiseSource,
            writer=ResultWriter(),
        )


app.command(name="solve", help="Solve the observation game and write the schedules.")(solve)
app.command(name="simulate", help="Simulate one closed-loop path.")(simulate)
app.command(name="montecarlo", help="Estimate the expected cost by simulation.")(montecarlo)
app.command(name="mc", hidden=True, help="Alias for montecarlo.")(montecarlo)
app.command(name="period", help="Optimal sampling period of the infinite-horizon game.")(period)
app.command(name="sweep", help="Solve the game over a range of observation prices.")(sweep)


def run_command(argv: Sequence[str]) -> int:
    """Run the CLI with ``argv`` and return its exit code."""
    try:
        app(args=list(argv), prog_name="peec")
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0


if __name__ == "__main__":
    app()
