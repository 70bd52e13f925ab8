"""Run configuration model (JSON, or YAML in the same schema)."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from peec.errors import ConfigNotFoundError, ConfigParseError, ConfigSchemaError
from peec.models.game import MATRIX_FIELDS, GameSpec, Matrix, validate_spec

GAME_FIELDS = (*MATRIX_FIELDS, "Op", "Oe", "T", "x0")
PRICE_PARAMS = ("Op", "Oe")
SWEEP_PARAMS = (*PRICE_PARAMS, "c", "gamma")
INF_TOKENS = ("inf", "+inf", "infinity")


@dataclass(frozen=True)
class Numerics:
    """Discretization and randomness settings."""

    riccati_steps: int = 4096
    sim_steps: int = 6000
    eps: float = 1e-5
    seed: int = 42


@dataclass(frozen=True)
class Sweep:
    """Parameter sweep definition for the ``sweep`` command."""

    param: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class Experiment:
    """Command-specific experiment options.

    ``pursuer_instants`` of ``None`` means "solve the CE game for the plan".
    """

    monte_carlo_paths: int = 1000
    pursuer_instants: tuple[float, ...] | None = None
    evader_instants: tuple[float, ...] = ()
    position_indices: tuple[int, int] | None = None
    sweep: Sweep | None = None


@dataclass(frozen=True, eq=False)
class RunConfig:
    """A validated game plus numerics and experiment options."""

    game: GameSpec
    numerics: Numerics = field(default_factory=Numerics)
    experiment: Experiment = field(default_factory=Experiment)

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        """Load a run configuration.

        Args:
            path: Path to a ``.json`` file, or ``.yml``/``.yaml`` in the same schema.

        Returns:
            Parsed RunConfig with a validated game.

        Raises:
            ConfigNotFoundError: If the file does not exist.
            ConfigParseError: If the text is not valid JSON/YAML.
            ConfigSchemaError: If a field is missing, unknown or mistyped.
            SpecValidationError: If the game violates a model invariant.
        """
        if not path.exists():
            raise ConfigNotFoundError(str(path))

        content = path.read_text(encoding="utf-8")
        if path.suffix.lower() in (".yml", ".yaml"):
            try:
                data = yaml.safe_load(content)
            except yaml.YAMLError as e:
                mark = getattr(e, "problem_mark", None)
                if mark is None:
                    raise ConfigParseError(str(e))
                raise ConfigParseError(str(getattr(e, "problem", e)), mark.line + 1, mark.column + 1)
        else:
            try:
                data = json.loads(content)
            except json.JSONDecodeError as e:
                raise ConfigParseError(e.msg, e.lineno, e.colno)

        return cls._from_dict(data)

    @classmethod
    def _from_dict(cls, data: Any) -> "RunConfig":
        """Parse a run configuration from a dictionary.

        Raises:
            ConfigSchemaError: If the structure does not match the schema.
        """
        if not isinstance(data, dict):
            raise ConfigSchemaError("<root>", "must be an object")
        _reject_unknown(data, ("game", "numerics", "experiment"), "")

        if "game" not in data:
            raise ConfigSchemaError("game", "missing required field")
        game = _parse_game(data["game"])
        numerics = _parse_numerics(data.get("numerics", {}))
        experiment = _parse_experiment(data.get("experiment", {}))
        return cls(game=game, numerics=numerics, experiment=experiment)

    def to_dict(self) -> dict[str, Any]:
        game = self.game
        data: dict[str, Any] = {
            "game": {
                **{name: getattr(game, name).tolist() for name in MATRIX_FIELDS},
                "Op": _price_out(game.Op),
                "Oe": _price_out(game.Oe),
                "T": game.T,
                "x0": game.x0.tolist(),
            },
            "numerics": {
                "riccati_steps": self.numerics.riccati_steps,
                "sim_steps": self.numerics.sim_steps,
                "eps": self.numerics.eps,
                "seed": self.numerics.seed,
            },
        }
        exp = self.experiment
        experiment: dict[str, Any] = {
            "monte_carlo_paths": exp.monte_carlo_paths,
            "pursuer_instants": None if exp.pursuer_instants is None else list(exp.pursuer_instants),
            "evader_instants": list(exp.evader_instants),
            "position_indices": None if exp.position_indices is None else list(exp.position_indices),
        }
        if exp.sweep is not None:
            experiment["sweep"] = {
                "param": exp.sweep.param,
                "values": [_price_out(v) for v in exp.sweep.values],
            }
        data["experiment"] = experiment
        return data

    def save(self, path: Path) -> None:
        """Save the configuration as JSON (infinite prices written as ``"inf"``)."""
        path.write_text(
            json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )


def _reject_unknown(data: dict[str, Any], allowed: tuple[str, ...], prefix: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigSchemaError(f"{prefix}{key}", "unknown field")


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigSchemaError(name, "must be a number")
    return float(value)


def _integer(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigSchemaError(name, "must be an integer")
    if value < minimum:
        raise ConfigSchemaError(name, f"must be >= {minimum}")
    return value


def _price(value: Any, name: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() in INF_TOKENS:
            return math.inf
        raise ConfigSchemaError(name, 'must be a number or "inf"')
    return _number(value, name)


def _price_out(value: float) -> float | str:
    return "inf" if math.isinf(value) else value


def _matrix(value: Any, name: str) -> Matrix:
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise ConfigSchemaError(name, "must be a non-empty list of rows")
    rows = [[_number(v, name) for v in row] for row in value]
    if len({len(row) for row in rows}) != 1:
        raise ConfigSchemaError(name, "rows must have equal length")
    return np.array(rows, dtype=np.float64)


def _vector(value: Any, name: str) -> list[float]:
    if not isinstance(value, list):
        raise ConfigSchemaError(name, "must be a list of numbers")
    return [_number(v, name) for v in value]


def _parse_game(raw: Any) -> GameSpec:
    if not isinstance(raw, dict):
        raise ConfigSchemaError("game", "must be an object")
    _reject_unknown(raw, GAME_FIELDS, "game.")
    for name in GAME_FIELDS:
        if name not in raw:
            raise ConfigSchemaError(f"game.{name}", "missing required field")

    mats = {name: _matrix(raw[name], f"game.{name}") for name in MATRIX_FIELDS}
    return validate_spec(
        GameSpec(
            **mats,
            Op=_price(raw["Op"], "game.Op"),
            Oe=_price(raw["Oe"], "game.Oe"),
            T=_number(raw["T"], "game.T"),
            x0=np.array(_vector(raw["x0"], "game.x0"), dtype=np.float64),
        )
    )


def _parse_numerics(raw: Any) -> Numerics:
    if not isinstance(raw, dict):
        raise ConfigSchemaError("numerics", "must be an object")
    _reject_unknown(raw, ("riccati_steps", "sim_steps", "eps", "seed"), "numerics.")
    defaults = Numerics()
    eps = _number(raw.get("eps", defaults.eps), "numerics.eps")
    if not eps > 0:
        raise ConfigSchemaError("numerics.eps", "must be positive")
    return Numerics(
        riccati_steps=_integer(raw.get("riccati_steps", defaults.riccati_steps), "numerics.riccati_steps", 1),
        sim_steps=_integer(raw.get("sim_steps", defaults.sim_steps), "numerics.sim_steps", 1),
        eps=eps,
        seed=_integer(raw.get("seed", defaults.seed), "numerics.seed", 0),
    )


def _parse_experiment(raw: Any) -> Experiment:
    if not isinstance(raw, dict):
        raise ConfigSchemaError("experiment", "must be an object")
    _reject_unknown(
        raw,
        ("monte_carlo_paths", "pursuer_instants", "evader_instants", "position_indices", "sweep"),
        "experiment.",
    )
    defaults = Experiment()

    pursuer = raw.get("pursuer_instants")
    pursuer_instants = None if pursuer is None else tuple(_vector(pursuer, "experiment.pursuer_instants"))
    evader_instants = tuple(_vector(raw.get("evader_instants", []), "experiment.evader_instants"))

    indices = raw.get("position_indices")
    position_indices: tuple[int, int] | None = None
    if indices is not None:
        if not isinstance(indices, list) or len(indices) != 2:
            raise ConfigSchemaError("experiment.position_indices", "must be a pair of integers")
        position_indices = (
            _integer(indices[0], "experiment.position_indices", 0),
            _integer(indices[1], "experiment.position_indices", 0),
        )

    sweep: Sweep | None = None
    if raw.get("sweep") is not None:
        sweep_raw = raw["sweep"]
        if not isinstance(sweep_raw, dict):
            raise ConfigSchemaError("experiment.sweep", "must be an object")
        _reject_unknown(sweep_raw, ("param", "values"), "experiment.sweep.")
        param = sweep_raw.get("param")
        if param not in SWEEP_PARAMS:
            raise ConfigSchemaError("experiment.sweep.param", f"must be one of {', '.join(SWEEP_PARAMS)}")
        values = sweep_raw.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigSchemaError("experiment.sweep.values", "must be a non-empty list")
        sweep = Sweep(param=param, values=tuple(_price(v, "experiment.sweep.values") for v in values))

    return Experiment(
        monte_carlo_paths=_integer(
            raw.get("monte_carlo_paths", defaults.monte_carlo_paths), "experiment.monte_carlo_paths", 2
        ),
        pursuer_instants=pursuer_instants,
        evader_instants=evader_instants,
        position_indices=position_indices,
        sweep=sweep,
    )
