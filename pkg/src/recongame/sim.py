"""Fixed-step simulation of the game under state-feedback strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GameConfig, GameState, Phase, TerminalStatus, signed_target_gap


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``locate_switch`` refines the step in which the Intruder's safe-retreat
    margin crosses zero so the switch lands on the crossing instead of the
    next sample.
    """

    dt: float = 1e-3
    max_time: float = 10.0
    capture_radius: float = 0.0
    coincidence_tol: float = 1e-9
    locate_switch: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.dt > self.max_time:
            raise ValueError("dt must not exceed max_time")
        if self.capture_radius < 0:
            raise ValueError("capture_radius must be >= 0")


@dataclass
class TrajectoryRecord:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    phases: list = field(default_factory=list)
    intruder_headings: list = field(default_factory=list)
    defender_headings: list = field(default_factory=list)
    running_min_gap: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def append(self, t, s, phase, phi, psi, l):
        gap = signed_target_gap(s.intruder, l)
        if self.running_min_gap:
            gap = min(gap, self.running_min_gap[-1])
        self.times.append(t)
        self.states.append(s)
        self.phases.append(phase)
        self.intruder_headings.append(phi)
        self.defender_headings.append(psi)
        self.running_min_gap.append(gap)

    def as_array(self) -> np.ndarray:
        return np.array([s.as_tuple() for s in self.states])

    def phase_changes(self) -> int:
        return sum(a != b for a, b in zip(self.phases, self.phases[1:]))


@dataclass(frozen=True)
class SimOutcome:
    status: TerminalStatus
    payoff: float
    t_final: float
    t_switch_first: float | None
    terminal_state: GameState
    timed_out: bool = False

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "timed_out": self.timed_out,
            "payoff": self.payoff,
            "t_final": self.t_final,
            "t_switch_first": self.t_switch_first,
            "terminal_state": list(self.terminal_state.as_tuple()),
        }


def step(s: GameState, phi: float, psi: float, alpha: float, dt: float) -> GameState:
    """Advance both agents with headings held over ``dt``.

    Simple motion with a held heading is a straight line, so this is exact.
    """
    xI, yI, xD, yD = s.as_tuple()
    return GameState.from_array([
        xI + dt * math.cos(phi),
        yI + dt * math.sin(phi),
        xD + alpha * dt * math.cos(psi),
        yD + alpha * dt * math.sin(psi),
    ])


def _lerp(a: GameState, b: GameState, f: float) -> GameState:
    return GameState.from_array(a.as_array() + f * (b.as_array() - a.as_array()))


def _first_contact(s: GameState, n: GameState, radius: float) -> float | None:
    """Earliest step fraction at which the separation is <= ``radius``."""
    r0 = np.array([s.intruder.x - s.defender.x, s.intruder.y - s.defender.y])
    r1 = np.array([n.intruder.x - n.defender.x, n.intruder.y - n.defender.y])
    d = r1 - r0
    a, b, c = d @ d, 2 * (r0 @ d), r0 @ r0 - radius * radius
    if c <= 0:
        return 0.0
    if a == 0:
        return None
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    tau = (-b - math.sqrt(disc)) / (2 * a)
    return tau if 0 <= tau <= 1 else None


def payoff_of(tr: TrajectoryRecord, l: float, clamped: bool = False) -> float:
    """Closest recorded approach to the target region.

    The signed version goes negative if the Intruder entered the target;
    ``clamped=True`` gives the plain distance instead.
    """
    if not tr.states:
        raise ValueError("empty trajectory")
    gaps = [signed_target_gap(s.intruder, l) for s in tr.states]
    m = min(gaps)
    return max(m, 0.0) if clamped else m


def run(s0: GameState, intruder_strategy, defender_strategy, cfg: GameConfig,
        sim: SimConfig | None = None) -> tuple[TrajectoryRecord, SimOutcome]:
    sim = sim or SimConfig()
    if s0.intruder.y <= 0:
        raise ValueError("initial state is already terminal (y_I <= 0)")
    radius = sim.capture_radius + sim.coincidence_tol
    margin = getattr(intruder_strategy, "switch_margin", None) if sim.locate_switch else None

    tr = TrajectoryRecord()
    s, t = s0, 0.0
    phi_prev = psi_prev = -math.pi / 2
    t_switch = None
    status = TerminalStatus.ONGOING
    timed_out = False
    if s0.separation <= radius:
        status = TerminalStatus.CAPTURED

    while status is TerminalStatus.ONGOING:
        ci, cd = intruder_strategy(s), defender_strategy(s)
        phi = phi_prev if ci.angle is None else ci.angle
        psi = psi_prev if cd.angle is None else cd.angle
        phi_prev, psi_prev = phi, psi
        if ci.phase is Phase.RETREAT and t_switch is None:
            t_switch = t
        tr.append(t, s, ci.phase, phi, psi, cfg.l)
        if t >= sim.max_time - 1e-12:
            timed_out = True
            break

        h = sim.dt
        n = step(s, phi, psi, cfg.alpha, h)
        if margin is not None and ci.phase is Phase.APPROACH and n.intruder.y > 0:
            m0, m1 = margin(s), margin(n)
            if m0 > 0 > m1:
                h *= m0 / (m0 - m1)
                n = step(s, phi, psi, cfg.alpha, h)

        f_ret = s.intruder.y / (s.intruder.y - n.intruder.y) if n.intruder.y <= 0 else None
        f_cap = _first_contact(s, n, radius)
        if f_cap is not None and (f_ret is None or f_cap < f_ret):
            hit = _lerp(s, n, f_cap)
            if hit.intruder.y > sim.coincidence_tol:
                s, t, status = hit, t + f_cap * h, TerminalStatus.CAPTURED
                break
        if f_ret is not None:
            s = _lerp(s, n, f_ret)
            s = GameState.from_array([s.intruder.x, 0.0, s.defender.x, s.defender.y])
            t, status = t + f_ret * h, TerminalStatus.RETREATED
            break
        s, t = n, t + h

    if not timed_out:
        tr.append(t, s, tr.phases[-1] if tr.phases else Phase.APPROACH, phi_prev, psi_prev, cfg.l)
    outcome = SimOutcome(status, payoff_of(tr, cfg.l), t, t_switch, s, timed_out)
    return tr, outcome


def simulate_scenario(s0: GameState, intruder: str, defender: str, cfg: GameConfig,
                      sim: SimConfig | None = None):
    """Run with strategies picked by registry name."""
    from .strategies import make_defender, make_intruder

    sim = sim or SimConfig()
    return run(s0, make_intruder(intruder, cfg, sim.dt), make_defender(defender, cfg), cfg, sim)
