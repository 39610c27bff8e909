"""Domain types and region geometry for the reconnaissance game.

The target region is the half-plane ``y >= l`` and the retreat region is
``y <= 0``. The Intruder moves at unit speed, the Defender at ``alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class GameState:
    """Positions of both agents, the 4-vector ``[x_I, y_I, x_D, y_D]``."""

    intruder: Point2
    defender: Point2

    def __post_init__(self):
        object.__setattr__(self, "intruder", Point2(float(self.intruder[0]), float(self.intruder[1])))
        object.__setattr__(self, "defender", Point2(float(self.defender[0]), float(self.defender[1])))
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"non-finite game state: {self.as_tuple()}")

    @classmethod
    def from_array(cls, x) -> "GameState":
        xI, yI, xD, yD = (float(v) for v in x)
        return cls(Point2(xI, yI), Point2(xD, yD))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.intruder.x, self.intruder.y, self.defender.x, self.defender.y)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @property
    def separation(self) -> float:
        return math.hypot(self.intruder.x - self.defender.x, self.intruder.y - self.defender.y)


@dataclass(frozen=True)
class GameConfig:
    """Game parameters.

    Parameters
    ----------
    alpha : float
        Defender/Intruder speed ratio, must exceed 1.
    l : float
        Offset of the target region ``y >= l``.
    switch_tol : float
        Safe-retreat margin (a ``V_II`` level) at or below which the
        equilibrium Intruder retreats.
    solver_tol : float
        Abscissa tolerance of the retreat-point search.
    """

    alpha: float = 1.2
    l: float = 1.0
    switch_tol: float = 1e-6
    solver_tol: float = 1e-12

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"alpha must be > 1, got {self.alpha}")
        if not self.l > 0:
            raise ValueError(f"l must be > 0, got {self.l}")
        if self.switch_tol < 0:
            raise ValueError("switch_tol must be >= 0")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be > 0")


class Phase(str, Enum):
    APPROACH = "ApproachI"
    RETREAT = "RetreatII"


class TerminalStatus(str, Enum):
    ONGOING = "Ongoing"
    RETREATED = "Retreated"
    CAPTURED = "Captured"


def dist_to_target(p, l: float) -> float:
    """Euclidean distance from ``p`` to the target half-plane ``y >= l``."""
    return max(l - p[1], 0.0)


def signed_target_gap(p, l: float) -> float:
    """``l - y``; negative once ``p`` is inside the target region."""
    return l - p[1]


def terminal_status(s: GameState, capture_radius: float = 0.0) -> TerminalStatus:
    # Coincidence on the retreat boundary counts as a retreat.
    if s.intruder.y <= 0:
        return TerminalStatus.RETREATED
    if s.separation <= capture_radius:
        return TerminalStatus.CAPTURED
    return TerminalStatus.ONGOING
