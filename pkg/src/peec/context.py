"""Application context for dependency injection."""

from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

from peec.protocols.noise import NoiseSourceProtocol
from peec.protocols.writer import ResultWriterProtocol


@dataclass
class AppContext:
    """Application context holding dependencies."""

    noise_factory: Callable[[int], NoiseSourceProtocol]
    writer: ResultWriterProtocol
    working_dir: Path = field(default_factory=Path.cwd)

    def resolve(self, path: Path) -> Path:
        """Anchor a relative path at the working directory."""
        return path if path.is_absolute() else self.working_dir / path
