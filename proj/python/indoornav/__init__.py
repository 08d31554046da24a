"""Deterministic indoor UAV navigation simulator."""

from ._core import (
    INSCRIBED,
    LETHAL,
    UNKNOWN,
    CommandRejected,
    OutOfGrid,
    PlanningError,
    Scenario,
    ScenarioError,
    Simulation,
    distance_transform,
    inflate,
    load_scenario,
    load_scenario_file,
    model_clearance,
    plan_global,
    run_experiment,
    sweep,
)

__all__ = [
    "INSCRIBED",
    "LETHAL",
    "UNKNOWN",
    "CommandRejected",
    "OutOfGrid",
    "PlanningError",
    "Scenario",
    "ScenarioError",
    "Simulation",
    "distance_transform",
    "inflate",
    "load_scenario",
    "load_scenario_file",
    "model_clearance",
    "plan_global",
    "run_experiment",
    "sweep",
]
