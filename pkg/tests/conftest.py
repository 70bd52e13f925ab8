"""Shared pytest fixtures for PEEC."""

from pathlib import Path

import pytest
from typer import Typer
from typer.testing import CliRunner

from dev.games import scalar_game
from dev.mocks.noise import MockNoiseSource
from peec.main import app
from peec.models.builders import planar_double_integrator
from peec.models.config import Numerics, RunConfig
from peec.models.game import GameSpec
from peec.services.lqg import GramianCache, RiccatiSolution, TimeGrid, solve_riccati_finite


@pytest.fixture()
def cli_runner() -> CliRunner:
    """Provide a CLI runner for testing Typer commands."""
    return CliRunner()


@pytest.fixture()
def typer_app() -> Typer:
    """Return the Typer application under test."""
    return app


@pytest.fixture()
def scalar_spec() -> GameSpec:
    """Scalar game with K(t) = 1 / (1 + T - t) on T = 1."""
    return scalar_game()


@pytest.fixture()
def scalar_riccati(scalar_spec: GameSpec) -> RiccatiSolution:
    return solve_riccati_finite(scalar_spec, TimeGrid(scalar_spec.T, 512))


@pytest.fixture()
def scalar_cache(scalar_spec: GameSpec, scalar_riccati: RiccatiSolution) -> GramianCache:
    return GramianCache(scalar_spec, scalar_riccati.grid)


@pytest.fixture()
def planar_spec() -> GameSpec:
    """Two-axis double-integrator chase with Op = 900."""
    return planar_double_integrator(Op=900.0)


@pytest.fixture()
def planar_riccati(planar_spec: GameSpec) -> RiccatiSolution:
    return solve_riccati_finite(planar_spec, TimeGrid(planar_spec.T, 1024))


@pytest.fixture()
def planar_cache(planar_spec: GameSpec, planar_riccati: RiccatiSolution) -> GramianCache:
    return GramianCache(planar_spec, planar_riccati.grid)


@pytest.fixture()
def mock_noise() -> MockNoiseSource:
    """Provide a zero-noise source for testing."""
    return MockNoiseSource()


@pytest.fixture()
def planar_config_path(tmp_path: Path, planar_spec: GameSpec) -> Path:
    """Planar config with coarse numerics, saved as JSON."""
    path = tmp_path / "planar.json"
    config = RunConfig(game=planar_spec, numerics=Numerics(riccati_steps=512, sim_steps=600, seed=7))
    config.save(path)
    return path


@pytest.fixture()
def app_with_mocks(mock_noise: MockNoiseSource) -> Typer:
    """Return app with a zero-noise source injected via callback override."""
    import typer

    from peec.context import AppContext
    from peec.services.writer import ResultWriter

    test_app = typer.Typer(
        name="peec",
        help="PEEC - Test App",
        no_args_is_help=True,
    )

    @test_app.callback()
    def setup(ctx: typer.Context) -> None:
        ctx.obj = AppContext(
            noise_factory=lambda seed: mock_noise,
            writer=ResultWriter(),
        )

    # Register commands from main app
    for command_info in app.registered_commands:
        if command_info.callback:
            test_app.command(
                name=command_info.name,
                help=command_info.help,
                hidden=command_info.hidden,
            )(command_info.callback)

    return test_app
