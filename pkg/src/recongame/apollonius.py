"""Safe-reachable (Apollonius) disk of the Intruder."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import GameState, Point2


@dataclass(frozen=True)
class ApolloniusDisk:
    center: Point2
    radius: float

    def contains(self, p, tol: float = 0.0) -> bool:
        return math.hypot(p[0] - self.center.x, p[1] - self.center.y) <= self.radius + tol


def delta(s: GameState, p, alpha: float) -> float:
    """Separation of the agents when the Intruder reaches ``p``.

    Both agents are assumed to travel in straight lines at full speed, so the
    result is positive iff the Intruder gets to ``p`` first.
    """
    xI, yI, xD, yD = s.as_tuple()
    return math.hypot(p[0] - xD, p[1] - yD) - alpha * math.hypot(p[0] - xI, p[1] - yI)


def apollonius_disk(s: GameState, alpha: float) -> ApolloniusDisk:
    xI, yI, xD, yD = s.as_tuple()
    a2 = alpha * alpha
    center = Point2((a2 * xI - xD) / (a2 - 1), (a2 * yI - yD) / (a2 - 1))
    return ApolloniusDisk(center, alpha * s.separation / (a2 - 1))


def in_phase_two_domain(s: GameState, alpha: float) -> bool:
    """True iff the Apollonius disk reaches the retreat half-plane ``y <= 0``.

    Uses the closed-form test ``alpha^2 y_I - y_D <= alpha |I - D|``, which
    is the lowest point of the disk lying on or below ``y = 0``.
    """
    xI, yI, xD, yD = s.as_tuple()
    return alpha * alpha * yI - yD <= alpha * s.separation
