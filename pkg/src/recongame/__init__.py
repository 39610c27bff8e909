"""Two-phase reconnaissance game: closed-form Values, strategies, simulation and checks."""

from .core import GameConfig, GameState, Phase, Point2, TerminalStatus
from .estimator import ReconnaissanceGame
from .openloop import build_plan, optimal_parameters
from .sim import SimConfig, run, simulate_scenario
from .value import classify_state, level_set_grid, value_phase1, value_phase2

__all__ = [
    "GameConfig", "GameState", "Phase", "Point2", "TerminalStatus", "ReconnaissanceGame", "build_plan",
    "optimal_parameters", "SimConfig", "run", "simulate_scenario", "classify_state", "level_set_grid",
    "value_phase1", "value_phase2",
]
