"""State-feedback heading laws.

Every strategy is a callable ``strategy(state) -> HeadingCommand``. A
command with ``angle=None`` means the agent already sits on its aim point;
the simulator then holds the previous heading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import GameConfig, GameState, Phase
from .value import value_phase2

_AIM_EPS = 1e-12


class GameOverError(ValueError):
    """Raised when a strategy is queried at a terminal state (``y_I <= 0``)."""


@dataclass(frozen=True)
class HeadingCommand:
    angle: float | None
    phase: Phase


def _aim(frm, to) -> float | None:
    dx, dy = to[0] - frm[0], to[1] - frm[1]
    if math.hypot(dx, dy) <= _AIM_EPS:
        return None
    return math.atan2(dy, dx)


def _check_live(s: GameState):
    if s.intruder.y <= 0:
        raise GameOverError(f"terminal state, y_I = {s.intruder.y}")


def projected_retreat_point(s: GameState, alpha: float) -> tuple[float, float]:
    """Apollonius centre projected onto ``y = 0``."""
    a2 = alpha * alpha
    return ((a2 * s.intruder.x - s.defender.x) / (a2 - 1), 0.0)


def approach_headings(s: GameState, alpha: float) -> tuple[float | None, float | None]:
    """Phase-I equilibrium headings ``(phi, psi)`` from the retreat geometry.

    The Defender aims at the projected retreat point; the Intruder climbs
    with the horizontal speed that puts it over that point at the Defender's
    arrival time. Unlike the closed-form ``Lambda`` expression this keeps the
    sign of ``x_I - x_D``.
    """
    p = projected_retreat_point(s, alpha)
    psi = _aim(s.defender, p)
    t_f = math.hypot(p[0] - s.defender.x, s.defender.y) / alpha
    if t_f <= _AIM_EPS:
        return None, psi
    c = min(1.0, max(-1.0, (p[0] - s.intruder.x) / t_f))
    return math.atan2(math.sqrt(1 - c * c), c), psi


def _approaching(s: GameState, cfg: GameConfig):
    sol = value_phase2(s, cfg.alpha, cfg.solver_tol)
    return sol.value > cfg.switch_tol, sol


def intruder_equilibrium(s: GameState, cfg: GameConfig) -> HeadingCommand:
    """Equilibrium Intruder heading.

    While the safe-retreat margin ``V_II`` exceeds ``switch_tol`` the
    Intruder approaches the target, moving horizontally at the rate that
    brings it over the projected retreat point exactly when the Defender
    gets there. Otherwise it runs straight to the Phase-II retreat point.
    """
    _check_live(s)
    approach, sol = _approaching(s, cfg)
    if not approach:
        return HeadingCommand(_aim(s.intruder, sol.retreat_point), Phase.RETREAT)
    return HeadingCommand(approach_headings(s, cfg.alpha)[0], Phase.APPROACH)


def defender_equilibrium(s: GameState, cfg: GameConfig) -> HeadingCommand:
    """Equilibrium Defender heading: straight at the active retreat point."""
    _check_live(s)
    approach, sol = _approaching(s, cfg)
    if approach:
        return HeadingCommand(approach_headings(s, cfg.alpha)[1], Phase.APPROACH)
    return HeadingCommand(_aim(s.defender, sol.retreat_point), Phase.RETREAT)


def lambda_headings(s: GameState, alpha: float) -> tuple[float, float]:
    """Phase-I headings through the closed-form ``Lambda`` expressions.

    Only valid for ``x_I > x_D``: the expression squares away the sign of
    ``x_I - x_D``.
    """
    dx = s.intruder.x - s.defender.x
    a2 = alpha * alpha
    lam = 1 / math.sqrt(a2 + (a2 - 1) ** 2 / a2 * s.defender.y**2 / dx**2)
    phi = math.atan2(math.sqrt(1 - lam * lam), lam)
    psi = math.atan2(-math.sqrt(max(0.0, 1 - a2 * lam * lam)), alpha * lam)
    return phi, psi


def pure_pursuit(s: GameState) -> HeadingCommand:
    ang = _aim(s.defender, s.intruder)
    return HeadingCommand(ang, Phase.APPROACH)


def greedy_approach(s: GameState, cfg: GameConfig, dt: float, heading: float = math.pi / 2) -> HeadingCommand:
    """Head straight at the target while a one-step lookahead stays safe.

    The lookahead moves the Intruder ``dt`` along ``heading`` (straight up
    by default) and the Defender ``alpha * dt`` along its equilibrium
    heading, then requires ``V_II >= switch_tol``. When the guard fails the
    Intruder retreats.
    """
    _check_live(s)
    psi = defender_equilibrium(s, cfg).angle
    psi = -math.pi / 2 if psi is None else psi
    xI, yI, xD, yD = s.as_tuple()
    ahead = GameState.from_array([
        xI + dt * math.cos(heading), yI + dt * math.sin(heading),
        xD + cfg.alpha * dt * math.cos(psi), yD + cfg.alpha * dt * math.sin(psi),
    ])
    if value_phase2(ahead, cfg.alpha, cfg.solver_tol).value >= cfg.switch_tol:
        return HeadingCommand(heading, Phase.APPROACH)
    sol = value_phase2(s, cfg.alpha, cfg.solver_tol)
    return HeadingCommand(_aim(s.intruder, sol.retreat_point), Phase.RETREAT)


# -- callable wrappers used by the simulator ---------------------------------

class EquilibriumIntruder:
    name = "equilibrium"

    def __init__(self, cfg: GameConfig):
        self.cfg = cfg

    def __call__(self, s: GameState) -> HeadingCommand:
        return intruder_equilibrium(s, self.cfg)

    def switch_margin(self, s: GameState) -> float:
        """Signed safe-retreat margin; the approach must stop where it hits 0."""
        return value_phase2(s, self.cfg.alpha, self.cfg.solver_tol).value


class EquilibriumDefender:
    name = "equilibrium"

    def __init__(self, cfg: GameConfig):
        self.cfg = cfg

    def __call__(self, s: GameState) -> HeadingCommand:
        return defender_equilibrium(s, self.cfg)


class PurePursuit:
    name = "pure-pursuit"

    def __call__(self, s: GameState) -> HeadingCommand:
        return pure_pursuit(s)


class GreedyIntruder:
    name = "greedy"

    def __init__(self, cfg: GameConfig, dt: float, heading: float = math.pi / 2):
        self.cfg = cfg
        self.dt = dt
        self.heading = heading

    def __call__(self, s: GameState) -> HeadingCommand:
        return greedy_approach(s, self.cfg, self.dt, self.heading)


class ConstantHeading:
    """Fixed heading; used as a deviation family in saddle-point checks."""

    def __init__(self, angle: float, name: str = "constant"):
        self.angle = angle
        self.name = name

    def __call__(self, s: GameState) -> HeadingCommand:
        return HeadingCommand(self.angle, Phase.APPROACH)


class PerturbedHeading:
    """Wraps a strategy and adds ``amplitude * sin(omega * k)`` at call ``k``.

    Stateful: build a fresh instance per run.
    """

    def __init__(self, base, amplitude: float, omega: float = 0.05):
        self.base = base
        self.amplitude = amplitude
        self.omega = omega
        self.name = f"perturbed-{getattr(base, 'name', 'strategy')}"
        self._k = 0

    def __call__(self, s: GameState) -> HeadingCommand:
        cmd = self.base(s)
        self._k += 1
        if cmd.angle is None:
            return cmd
        return HeadingCommand(cmd.angle + self.amplitude * math.sin(self.omega * self._k), cmd.phase)


INTRUDER_STRATEGIES = ("equilibrium", "greedy")
DEFENDER_STRATEGIES = ("equilibrium", "pure-pursuit")


def make_intruder(name: str, cfg: GameConfig, dt: float):
    if name == "equilibrium":
        return EquilibriumIntruder(cfg)
    if name == "greedy":
        return GreedyIntruder(cfg, dt)
    raise ValueError(f"unknown intruder strategy {name!r}; choose from {INTRUDER_STRATEGIES}")


def make_defender(name: str, cfg: GameConfig):
    if name == "equilibrium":
        return EquilibriumDefender(cfg)
    if name == "pure-pursuit":
        return PurePursuit()
    raise ValueError(f"unknown defender strategy {name!r}; choose from {DEFENDER_STRATEGIES}")
