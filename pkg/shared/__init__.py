"""Configuration shared across the toolkit."""
from .config import SolverConfig

__all__ = ["SolverConfig"]
