"""Application errors for PEEC."""


class PEECError(Exception):
    """Base error for PEEC operations."""

    pass


class ConfigError(PEECError):
    """Base for errors caused by user input (CLI exit code 2)."""

    pass


class NumericError(PEECError):
    """Base for numerical failures of a solver (CLI exit code 3)."""

    pass


class ConfigNotFoundError(ConfigError):
    """Raised when a run configuration file is not found."""

    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"Config not found: {path}")


class ConfigParseError(ConfigError):
    """Raised when a configuration file is not valid JSON or YAML."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"Config parse error{where}: {message}")


class ConfigSchemaError(ConfigError):
    """Raised when a configuration field is missing, unknown or mistyped."""

    def __init__(self, field: str, message: str = "invalid value") -> None:
        self.field = field
        super().__init__(f"Invalid config field '{field}': {message}")


class SpecValidationError(ConfigError):
    """Base for violations of the game specification invariants."""

    pass


class DimensionMismatchError(SpecValidationError):
    """Raised when matrix shapes are mutually inconsistent."""

    def __init__(self, message: str) -> None:
        super().__init__(f"Dimension mismatch: {message}")


class NotPositiveDefiniteError(SpecValidationError):
    """Raised when a weight matrix lacks the required definiteness."""

    def __init__(self, matrix: str, semi: bool = False) -> None:
        self.matrix = matrix
        kind = "positive semi-definite" if semi else "positive definite"
        super().__init__(f"Matrix {matrix} is not symmetric {kind}")


class NonFiniteEntryError(SpecValidationError):
    """Raised when a matrix or scalar contains NaN or an unexpected infinity."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Non-finite entry in {name}")


class NonPositiveHorizonError(SpecValidationError):
    """Raised when the game horizon is not strictly positive."""

    def __init__(self, horizon: float) -> None:
        self.horizon = horizon
        super().__init__(f"Horizon must be positive, got {horizon}")


class InvalidPlanError(ConfigError):
    """Raised when an observation plan is not a valid schedule on (0, T)."""

    def __init__(self, message: str) -> None:
        super().__init__(f"Invalid observation plan: {message}")


class UnsupportedLayoutError(ConfigError):
    """Raised when a figure cannot locate the planar position components."""

    def __init__(self, n: int) -> None:
        self.n = n
        super().__init__(
            f"Cannot infer planar positions for state dimension {n}; "
            "pass position_indices explicitly"
        )


class FiniteEscapeError(NumericError):
    """Raised when the Riccati solution blows up inside the horizon."""

    def __init__(self, time: float, norm: float) -> None:
        self.time = time
        self.norm = norm
        super().__init__(f"Riccati solution escapes at t={time:.6g} (norm {norm:.3g})")


class NotDominantSpecError(NumericError):
    """Raised when the evader out-maneuvers the pursuer and the game value is unbounded."""

    def __init__(self) -> None:
        super().__init__(
            "Evader is more maneuverable than the pursuer; the game value is unbounded"
        )


class NoConvergenceError(NumericError):
    """Raised when an iteration exhausts its budget."""

    def __init__(self, what: str, iterations: int) -> None:
        self.what = what
        self.iterations = iterations
        super().__init__(f"{what} did not converge within {iterations} iterations")


class NotObservableError(NumericError):
    """Raised when (A, Q^{1/2}) is not observable."""

    def __init__(self, rank: int, n: int) -> None:
        self.rank = rank
        self.n = n
        super().__init__(f"(A, Q^1/2) is not observable: rank {rank} < {n}")


class OutOfRangeError(NumericError):
    """Raised when a time argument lies outside its admissible interval."""

    def __init__(self, name: str, value: float, low: float, high: float) -> None:
        self.name = name
        self.value = value
        super().__init__(f"{name}={value:.12g} outside [{low:.12g}, {high:.12g}]")


class ChainBrokenError(NumericError):
    """Raised when the first-order chain of instants has no feasible start."""

    def __init__(self, n_obs: int) -> None:
        self.n_obs = n_obs
        super().__init__(
            f"No feasible first instant for {n_obs} observations; "
            "quadrature tolerance is too loose for this spec"
        )


class NoBracketError(NumericError):
    """Raised when no sign change of the period condition can be bracketed."""

    def __init__(self, upper: float) -> None:
        self.upper = upper
        super().__init__(f"Period condition has no root below {upper:.6g}")


class ZeroCostError(NumericError):
    """Raised when a bound needs a positive observation price."""

    def __init__(self) -> None:
        super().__init__("Observation price is zero; the observation count is unbounded")


class NotSubsetError(PEECError):
    """Raised when a monotonicity check receives non-nested instant sets."""

    def __init__(self, instant: float) -> None:
        self.instant = instant
        super().__init__(f"Instant {instant:.12g} of the smaller set is missing from the larger one")


class OutputError(PEECError):
    """Raised when a result file cannot be written."""

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
