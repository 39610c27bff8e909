"""Open-loop Phase-I solution for a fixed retreat point and final separation.

With the retreat point ``p`` and terminal separation ``delta`` frozen, the
approach phase has constant co-states and straight-line headings. The
functions here expose each piece (times, multiplier, co-states, the
open-loop Value and its dependence on ``p_x``) and assemble them into an
:class:`OpenLoopPlan`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .apollonius import apollonius_disk
from .core import GameConfig, GameState, Point2


class InfeasiblePlanError(ValueError):
    """The Intruder cannot reach the retreat point within the final time."""


@dataclass(frozen=True)
class RetreatParams:
    p: Point2
    delta: float = 0.0


@dataclass(frozen=True)
class CostateRecord:
    lambda_xI: float
    lambda_yI: float
    lambda_xD: float
    lambda_yD: float
    nu: float


@dataclass(frozen=True)
class OpenLoopPlan:
    params: RetreatParams
    t_f: float
    t_s: float
    cos_theta_I_s: float
    sin_theta_I_s: float
    theta_D_s: float
    costates: CostateRecord | None
    value: float
    X_I0: float
    Y_I0: float
    eta_D0: float

    @property
    def theta_I_s(self) -> float:
        return math.atan2(self.sin_theta_I_s, self.cos_theta_I_s)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"]["p"] = list(self.params.p)
        d["theta_I_s"] = self.theta_I_s
        return d


def _relative(s0: GameState, p):
    xI, yI, xD, yD = s0.as_tuple()
    return p[0] - xI, p[1] - yI, math.hypot(p[0] - xD, p[1] - yD)


def terminal_time(s0: GameState, rp: RetreatParams, alpha: float) -> float:
    _, _, eta = _relative(s0, rp.p)
    if not 0 <= rp.delta <= eta:
        raise ValueError(f"delta={rp.delta} outside [0, {eta}]")
    return (eta - rp.delta) / alpha


def _approach_root(s0: GameState, rp: RetreatParams, alpha: float):
    t_f = terminal_time(s0, rp, alpha)
    X, Y, _ = _relative(s0, rp.p)
    rad = t_f * t_f - X * X
    if rad <= 0:
        raise InfeasiblePlanError(f"t_f^2 - X_I0^2 = {rad} <= 0")
    return t_f, X, Y, math.sqrt(rad)


def switch_time(s0: GameState, rp: RetreatParams, alpha: float) -> float:
    """Switch time on the branch where the Intruder heads down after ``t_s``."""
    t_f, _, Y, root = _approach_root(s0, rp, alpha)
    return 0.5 * t_f * (1 + Y / root)


def open_loop_value(s0: GameState, rp: RetreatParams, cfg: GameConfig) -> float:
    if terminal_time(s0, rp, cfg.alpha) == 0:
        return cfg.l - s0.intruder.y
    _, _, Y, root = _approach_root(s0, rp, cfg.alpha)
    return cfg.l - s0.intruder.y - 0.5 * (root + Y)


def retreat_objective(p_x: float, s0: GameState, cfg: GameConfig) -> tuple[float, float, float]:
    """``F(p_x)`` with ``delta = 0`` and ``p_y = 0``, plus ``F'`` and ``F''``."""
    xI, yI, xD, yD = s0.as_tuple()
    a2 = cfg.alpha * cfg.alpha
    gamma = ((p_x - xD) ** 2 + yD * yD) / a2 - (p_x - xI) ** 2
    if gamma < 0:
        raise InfeasiblePlanError(f"Gamma({p_x}) = {gamma} < 0")
    k = (1 - a2) / a2 * p_x + xI - xD / a2
    root = math.sqrt(gamma)
    F = cfg.l - 0.5 * (yI + root)
    if root == 0:
        return F, math.copysign(math.inf, -k), math.inf
    F1 = -k / (2 * root)
    F2 = k * k / (2 * gamma * root) + (a2 - 1) / (2 * a2 * root)
    return F, F1, F2


def optimal_parameters(s0: GameState, cfg: GameConfig) -> RetreatParams:
    """Projection of the Apollonius centre onto ``y = 0``, with zero separation."""
    c = apollonius_disk(s0, cfg.alpha).center
    return RetreatParams(Point2(c.x, 0.0), 0.0)


def costates_and_multiplier(s_s: GameState, rp: RetreatParams, alpha: float) -> CostateRecord:
    xI, yI, xD, yD = s_s.as_tuple()
    px, py = rp.p
    dI = math.hypot(px - xI, py - yI)
    dD = math.hypot(px - xD, py - yD)
    if dI == 0 or py - yI == 0:
        raise InfeasiblePlanError("sin(theta_I^s) = 0")
    cos_I, sin_I = (px - xI) / dI, (py - yI) / dI
    return _costates(cos_I, sin_I, math.atan2(py - yD, px - xD) if dD > 0 else 0.0, alpha)


def _costates(cos_I: float, sin_I: float, theta_D: float, alpha: float) -> CostateRecord:
    nu = 1 / (2 * alpha * sin_I)
    return CostateRecord(
        lambda_xI=0.5 * cos_I / sin_I,
        lambda_yI=-0.5,
        lambda_xD=-nu * math.cos(theta_D),
        lambda_yD=-nu * math.sin(theta_D),
        nu=nu,
    )


def hamiltonian(costates: CostateRecord, phi: float, psi: float, alpha: float) -> float:
    c = costates
    return (c.lambda_xI * math.cos(phi) + c.lambda_yI * math.sin(phi)
            + alpha * (c.lambda_xD * math.cos(psi) + c.lambda_yD * math.sin(psi)))


def build_plan(s0: GameState, cfg: GameConfig, rp: RetreatParams | None = None) -> OpenLoopPlan:
    """Assemble the open-loop plan, by default at the optimal parameters.

    The terminal heading ``theta_I^s`` is kept as a cosine/sine pair so a
    retreat point left of the Intruder needs no angle unwrapping.
    """
    rp = optimal_parameters(s0, cfg) if rp is None else rp
    xD, yD = s0.defender
    X, Y, eta = _relative(s0, rp.p)
    theta_D = math.atan2(rp.p[1] - yD, rp.p[0] - xD)
    t_f = terminal_time(s0, rp, cfg.alpha)
    if t_f == 0:
        return OpenLoopPlan(rp, 0.0, 0.0, 1.0, 0.0, theta_D, None, cfg.l - s0.intruder.y, X, Y, eta)
    t_s = switch_time(s0, rp, cfg.alpha)
    cos_I = X / t_f
    sin_I = -math.sqrt(max(0.0, 1 - cos_I * cos_I))
    costates = _costates(cos_I, sin_I, theta_D, cfg.alpha) if sin_I != 0 else None
    return OpenLoopPlan(rp, t_f, t_s, cos_I, sin_I, theta_D, costates,
                        open_loop_value(s0, rp, cfg), X, Y, eta)


def plan_state(s0: GameState, plan: OpenLoopPlan, alpha: float, t: float) -> GameState:
    """State at time ``t`` when both agents follow the open-loop plan."""
    xI, yI, xD, yD = s0.as_tuple()
    t = min(max(t, 0.0), plan.t_f)
    up, down = min(t, plan.t_s), max(t - plan.t_s, 0.0)
    c, s = plan.cos_theta_I_s, plan.sin_theta_I_s
    return GameState.from_array([
        xI + t * c,
        yI - up * s + down * s,
        xD + alpha * t * math.cos(plan.theta_D_s),
        yD + alpha * t * math.sin(plan.theta_D_s),
    ])
