"""Registry of verified example algebroids, products and energies."""
from .registry import (
    Fact,
    MissingPreset,
    Scenario,
    ScenarioError,
    UnknownScenario,
    get,
    list_scenarios,
)

__all__ = [
    "Fact",
    "MissingPreset",
    "Scenario",
    "ScenarioError",
    "UnknownScenario",
    "get",
    "list_scenarios",
]
