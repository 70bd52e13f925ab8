"""CLI commands for PEEC."""

from peec.commands.montecarlo import montecarlo
from peec.commands.period import period
from peec.commands.simulate import simulate
from peec.commands.solve import solve
from peec.commands.sweep import sweep

__all__ = ["montecarlo", "period", "simulate", "solve", "sweep"]
