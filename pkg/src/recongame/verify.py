"""Numerical certification of the closed-form solution.

Everything here is an independent check: finite differences against the
analytic gradient, heading-grid min-max against the HJI equation, dense
grids against the retreat-point solver and the parameter formula, and
simulated unilateral deviations against the saddle-point ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .apollonius import apollonius_disk
from .core import GameConfig, GameState, Point2, TerminalStatus
from .openloop import RetreatParams, optimal_parameters, retreat_objective
from .sim import SimConfig, run
from .strategies import (
    ConstantHeading, EquilibriumDefender, EquilibriumIntruder, GreedyIntruder,
    PerturbedHeading, PurePursuit, approach_headings,
)
from .value import phase1_value_array, solve_retreat_points, value_phase1, value_phase2

FD_STEP = 1e-6
FD_FLOOR = 1e-9
N_HEADINGS = 720
SAMPLE_BOX = 2.0


class SingularGradientError(ValueError):
    pass


@dataclass
class VerificationReport:
    name: str
    samples: int
    max_abs_residual: float
    worst_case_input: GameState | None
    threshold: float
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_residual <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_abs_residual": self.max_abs_residual,
            "worst_case_input": None if self.worst_case_input is None else list(self.worst_case_input.as_tuple()),
            "pass": self.passed,
            "threshold": self.threshold,
            "seed": self.seed,
            "details": self.details,
        }


# -- sampling ------------------------------------------------------------------

def sample_states(n: int, cfg: GameConfig, seed: int = 0, region: str = "XI",
                  margin: float = 1e-3) -> np.ndarray:
    """Uniform states in ``[-2, 2]^4``, rejection-filtered into a region.

    ``region`` is ``"XI"`` (interior of the Intruder-win set), ``"XII"``
    (Phase-II domain) or ``"any"``. All regions keep ``y_I > 0`` and
    ``y_D > 0``. Returns an ``(n, 4)`` array.
    """
    rng = np.random.default_rng(seed)
    a = cfg.alpha
    out = []
    have = 0
    while have < n:
        X = rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, size=(4 * n + 64, 4))
        xI, yI, xD, yD = X.T
        keep = (yI > margin) & (yD > margin)
        sep = np.hypot(xI - xD, yI - yD)
        in_xii = a * a * yI - yD < a * sep - margin
        if region not in ("XI", "XII", "any"):
            raise ValueError(f"unknown region {region!r}")
        if region != "any":
            keep &= in_xii
        if region == "XI":
            keep &= phase1_value_array(xI, yI, xD, yD, a, cfg.l) > margin
            keep &= np.abs(xI - xD) > margin
        out.append(X[keep])
        have += int(keep.sum())
    return np.concatenate(out)[:n]


# -- gradient and HJI ------------------------------------------------------------

def grad_v1_analytic(s: GameState, cfg: GameConfig) -> np.ndarray:
    """Gradient of ``V_I`` in the ``Lambda`` parametrisation.

    ``Lambda`` carries the sign of ``x_I - x_D`` and the last entry the sign
    of ``y_D``, so the result is valid on both sides of the Defender.
    """
    xI, yI, xD, yD = s.as_tuple()
    a = cfg.alpha
    a2 = a * a
    dx = xI - xD
    den = math.sqrt(a2 * a2 * dx * dx + (a2 - 1) ** 2 * yD * yD)
    if den == 0:
        raise SingularGradientError("x_I == x_D and y_D == 0")
    lam = a * dx / den
    root = math.sqrt(1 - lam * lam)
    last = math.copysign(math.sqrt(max(0.0, 1 - a2 * lam * lam)) / root / a, yD)
    return -0.5 * np.array([lam / root, 1.0, -lam / root, last])


def grad_v1_fd(s: GameState, cfg: GameConfig, h: float = FD_STEP) -> np.ndarray:
    x = s.as_array()
    g = np.empty(4)
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        g[k] = (value_phase1(GameState.from_array(x + e), cfg)
                - value_phase1(GameState.from_array(x - e), cfg)) / (2 * h)
    return g


def dynamics(phi: float, psi: float, alpha: float) -> np.ndarray:
    return np.array([math.cos(phi), math.sin(phi), alpha * math.cos(psi), alpha * math.sin(psi)])


def hji_residual(s: GameState, cfg: GameConfig) -> float:
    """``grad V_I . f`` with both agents on their Phase-I equilibrium headings."""
    phi, psi = approach_headings(s, cfg.alpha)
    if phi is None or psi is None:
        raise SingularGradientError("degenerate aim point")
    return float(grad_v1_analytic(s, cfg) @ dynamics(phi, psi, cfg.alpha))


def hji_minmax(s: GameState, cfg: GameConfig, n_headings: int = N_HEADINGS) -> dict:
    """Discrete ``min_phi max_psi grad V_I . f`` over a heading grid.

    The Hamiltonian separates, so the min over ``phi`` and the max over
    ``psi`` are taken independently. Also reports the angular gap between
    the grid optimisers and the equilibrium headings.
    """
    g = grad_v1_analytic(s, cfg)
    ang = np.linspace(-math.pi, math.pi, n_headings, endpoint=False)
    hi = g[0] * np.cos(ang) + g[1] * np.sin(ang)
    hd = cfg.alpha * (g[2] * np.cos(ang) + g[3] * np.sin(ang))
    i, j = int(np.argmin(hi)), int(np.argmax(hd))
    phi, psi = approach_headings(s, cfg.alpha)

    def gap(a, b):
        return abs((a - b + math.pi) % (2 * math.pi) - math.pi)

    return {
        "value": float(hi[i] + hd[j]),
        "phi_gap": gap(ang[i], phi),
        "psi_gap": gap(ang[j], psi),
        "resolution": 2 * math.pi / n_headings,
    }


def grad_report(cfg: GameConfig, n: int = 1000, seed: int = 0, threshold: float = 1e-5) -> VerificationReport:
    X = sample_states(n, cfg, seed, "XI")
    worst, worst_s = 0.0, None
    for x in X:
        s = GameState.from_array(x)
        ga, gf = grad_v1_analytic(s, cfg), grad_v1_fd(s, cfg)
        err = float(np.max(np.abs(ga - gf)) / max(np.max(np.abs(ga)), FD_FLOOR))
        if err > worst or worst_s is None:
            worst, worst_s = err, s
    return VerificationReport("grad", len(X), worst, worst_s, threshold, seed, {"fd_step": FD_STEP})


def hji_report(cfg: GameConfig, n: int = 10000, seed: int = 0, threshold: float = 1e-8,
               n_minmax: int = 100) -> VerificationReport:
    X = sample_states(n, cfg, seed, "XI")
    worst, worst_s = 0.0, None
    for x in X:
        s = GameState.from_array(x)
        r = abs(hji_residual(s, cfg))
        if r > worst or worst_s is None:
            worst, worst_s = r, s
    mm = [hji_minmax(GameState.from_array(x), cfg) for x in X[:n_minmax]]
    details = {
        "minmax_samples": len(mm),
        "minmax_max_abs_value": max((abs(m["value"]) for m in mm), default=0.0),
        "minmax_max_heading_gap": max((max(m["phi_gap"], m["psi_gap"]) for m in mm), default=0.0),
        "heading_resolution": 2 * math.pi / N_HEADINGS,
    }
    return VerificationReport("hji", len(X), worst, worst_s, threshold, seed, details)


# -- brute-force oracles ---------------------------------------------------------

def _grid_max(xs, ys, xI, yI, xD, yD, alpha):
    best, best_p = -math.inf, None
    for y in np.array_split(ys, max(1, ys.size // 250)):
        P, Q = np.meshgrid(xs, y)
        d = np.hypot(P - xD, Q - yD) - alpha * np.hypot(P - xI, Q - yI)
        k = int(np.argmax(d))
        if d.flat[k] > best:
            best, best_p = float(d.flat[k]), Point2(float(P.flat[k]), float(Q.flat[k]))
    return best, best_p


def brute_force_value2(s: GameState, alpha: float, n_grid: int = 10**6,
                       n_zoom: int = 3) -> tuple[float, Point2]:
    """Max of ``delta`` over a dense grid covering part of the retreat region.

    Inside the Phase-II domain the grid spans the Apollonius disk
    horizontally, and ``2 r`` below ``y = 0``; otherwise the horizontal span
    widens to ``4 r + 1`` either side of the centre. The row ``y = 0`` is
    always on the grid. Each of ``n_zoom`` passes re-grids the 4 x 4 cell
    window around the best point on a 201 x 201 grid (clipped to ``y <= 0``), which resolves the
    kink of ``delta`` at ``p = I`` when the Intruder is close to ``y = 0``.
    """
    if n_grid < 1000:
        raise ValueError("n_grid must be >= 1000")
    xI, yI, xD, yD = s.as_tuple()
    if yI <= 0:
        return s.separation, s.intruder
    disk = apollonius_disk(s, alpha)
    c, r = disk.center, disk.radius
    half = r if c.y - r <= 0 else 4 * r + 1
    n = int(math.isqrt(n_grid))
    xs = np.linspace(c.x - half, c.x + half, n)
    ys = np.linspace(-2 * r - 1e-12, 0.0, n)
    best, best_p = _grid_max(xs, ys, xI, yI, xD, yD, alpha)
    for _ in range(n_zoom):
        hx, hy = 2 * (xs[1] - xs[0]), 2 * (ys[1] - ys[0])
        xs = np.linspace(best_p.x - hx, best_p.x + hx, 201)
        ys = np.linspace(best_p.y - hy, min(best_p.y + hy, 0.0), 201)
        v, p = _grid_max(xs, ys, xI, yI, xD, yD, alpha)
        if v > best:
            best, best_p = v, p
    return best, best_p


def _open_loop_grid(s0: GameState, cfg: GameConfig, px, py, frac):
    xI, yI, xD, yD = s0.as_tuple()
    eta = np.hypot(px - xD, py - yD)
    t_f = eta * (1 - frac) / cfg.alpha
    X, Y = px - xI, py - yI
    rad = t_f * t_f - X * X
    val = cfg.l - yI - 0.5 * (np.sqrt(np.where(rad > 0, rad, 0.0)) + Y)
    return np.where(rad > 0, val, np.inf)


def brute_force_phase1_params(s0: GameState, cfg: GameConfig, n_px: int = 10**4, n_delta: int = 100,
                              depths=(0.0, 0.01, 0.05, 0.2)) -> tuple[RetreatParams, float, dict]:
    """Exhaustive minimisation of the open-loop Value over ``(p_x, delta)``.

    ``p_x`` spans the feasible interval of the ``p_y = 0`` objective, ``delta``
    runs over ``[0, eta_D)`` in ``n_delta`` equal fractions, and each depth
    in ``depths`` places the retreat point that far below ``y = 0``. The best
    grid point is polished with a bounded scalar search along ``p_x``.

    Returns the best parameters, their value, and diagnostics including the
    best value found at each depth and the ``p_x`` cell width.
    """
    xI, yI, xD, yD = s0.as_tuple()
    a2 = cfg.alpha ** 2
    roots = np.roots([1 / a2 - 1, 2 * (xI - xD / a2), (xD * xD + yD * yD) / a2 - xI * xI])
    lo, hi = float(np.min(roots.real)), float(np.max(roots.real))
    px = np.linspace(lo, hi, n_px)
    frac = np.arange(n_delta) / n_delta
    P, Fr = np.meshgrid(px, frac, indexing="ij")
    per_depth = {}
    best = (math.inf, None, None, None)
    for depth in depths:
        V = _open_loop_grid(s0, cfg, P, -depth, Fr)
        k = int(np.argmin(V))
        per_depth[depth] = float(V.flat[k])
        if V.flat[k] < best[0]:
            best = (float(V.flat[k]), float(P.flat[k]), -depth, float(Fr.flat[k]))
    value, bx, by, bf = best
    cell = (hi - lo) / (n_px - 1)
    grid_px = bx
    if by == 0.0 and bf == 0.0:
        res = minimize_scalar(lambda x: retreat_objective(x, s0, cfg)[0],
                              bounds=(max(lo, bx - cell), min(hi, bx + cell)),
                              method="bounded", options={"xatol": 1e-12})
        if res.fun < value:
            value, bx = float(res.fun), float(res.x)
    eta = math.hypot(bx - xD, by - yD)
    info = {"per_depth": per_depth, "cell": cell, "grid_px": grid_px, "grid_delta": bf * eta}
    return RetreatParams(Point2(bx, by), bf * eta), value, info


def value2_oracle_report(cfg: GameConfig, n: int = 100, seed: int = 0, n_grid: int = 10**6,
                         threshold: float = 1e-4) -> VerificationReport:
    X = sample_states(n, cfg, seed, "XII")
    worst, worst_s = 0.0, None
    for x in X:
        s = GameState.from_array(x)
        err = abs(value_phase2(s, cfg.alpha, cfg.solver_tol).value - brute_force_value2(s, cfg.alpha, n_grid)[0])
        if err > worst or worst_s is None:
            worst, worst_s = err, s
    return VerificationReport("oracle-value2", len(X), worst, worst_s, threshold, seed, {"n_grid": n_grid})


def params_oracle_report(cfg: GameConfig, n: int = 20, seed: int = 0, n_px: int = 10**4, n_delta: int = 100,
                         threshold: float = 1e-6) -> VerificationReport:
    """Closed-form ``(p*, delta*)`` against the exhaustive sweep.

    The residual is the value gap after refinement; a parameter mismatch
    beyond one grid cell, or a negative-depth retreat point beating the
    boundary, is turned into an infinite residual.
    """
    X = sample_states(n, cfg, seed, "XI")
    worst, worst_s = 0.0, None
    worst_cell = 0.0
    depth_violations = 0
    for x in X:
        s = GameState.from_array(x)
        rp = optimal_parameters(s, cfg)
        bp, bval, info = brute_force_phase1_params(s, cfg, n_px, n_delta)
        err = abs(bval - value_phase1(s, cfg))
        cells = abs(info["grid_px"] - rp.p.x) / info["cell"]
        worst_cell = max(worst_cell, cells)
        if cells > 1 or info["grid_delta"] != 0.0:
            err = math.inf
        boundary = info["per_depth"][0.0]
        if any(v < boundary for d, v in info["per_depth"].items() if d > 0):
            depth_violations += 1
            err = math.inf
        if err > worst or worst_s is None:
            worst, worst_s = err, s
    details = {"max_px_offset_cells": worst_cell, "depth_violations": depth_violations,
               "n_px": n_px, "n_delta": n_delta}
    return VerificationReport("oracle-params", len(X), worst, worst_s, threshold, seed, details)


# -- tangency and saddle ----------------------------------------------------------

def tangency_check(s0: GameState, cfg: GameConfig, sim: SimConfig | None = None,
                   n_samples: int = 20001) -> dict:
    """Play equilibrium vs equilibrium to the switch and inspect ``delta`` there.

    At the switch state the retreat line should be tangent to the Apollonius
    disk at the initial projected retreat point ``p*``.
    """
    tr, out = run(s0, EquilibriumIntruder(cfg), EquilibriumDefender(cfg), cfg, sim or SimConfig())
    k = next(i for i, p in enumerate(tr.phases) if p.value == "RetreatII")
    s_s = tr.states[k]
    p_star = optimal_parameters(s0, cfg).p
    xI, yI, xD, yD = s_s.as_tuple()
    disk = apollonius_disk(s_s, cfg.alpha)
    xs = np.linspace(disk.center.x - 4 * disk.radius - 1, disk.center.x + 4 * disk.radius + 1, n_samples)
    ys = np.concatenate([[0.0], -np.geomspace(1e-6, 2 * disk.radius + 1, 40)])
    P, Q = np.meshgrid(xs, ys)
    d = np.hypot(P - xD, Q - yD) - cfg.alpha * np.hypot(P - xI, Q - yI)
    at_star = float(math.hypot(p_star.x - xD, p_star.y - yD) - cfg.alpha * math.hypot(p_star.x - xI, p_star.y - yI))
    return {
        "t_switch": tr.times[k],
        "switch_state": s_s,
        "delta_at_p_star": at_star,
        "max_excess": float(np.max(d) - at_star),
    }


def saddle_check(s0: GameState, cfg: GameConfig, sim: SimConfig | None = None, n_deviations: int = 3,
                 tol: float | None = None, seed: int = 0) -> VerificationReport:
    """Unilateral deviations from the equilibrium pair, simulated.

    Intruder deviations (guarded straight-line approaches, perturbed
    equilibrium) must not lower the payoff; Defender deviations (pure
    pursuit, constant headings, perturbed equilibrium) must not raise it.
    A capture counts as an infinite payoff. A run cut off at ``max_time``
    keeps its running minimum, which can only fall later, so it is an upper
    bound on the true payoff. The residual is the worst violation, so the
    report passes at residual 0.
    """
    sim = sim or SimConfig()
    tol = 5 * sim.dt if tol is None else tol
    rng = np.random.default_rng(seed)

    def payoff(i, d):
        _, out = run(s0, i, d, cfg, sim)
        return math.inf if out.status is TerminalStatus.CAPTURED else out.payoff

    base = payoff(EquilibriumIntruder(cfg), EquilibriumDefender(cfg))
    runs = []
    for k in range(n_deviations):
        fam = k % 2
        if k == 0:
            dev = GreedyIntruder(cfg, sim.dt)
        elif fam == 0:
            dev = GreedyIntruder(cfg, sim.dt, float(rng.uniform(0.3, math.pi - 0.3)))
        else:
            dev = PerturbedHeading(EquilibriumIntruder(cfg), float(rng.uniform(0.05, 0.5)))
        runs.append(("intruder", dev.name, payoff(dev, EquilibriumDefender(cfg))))
    for k in range(n_deviations):
        fam = k % 3
        if k == 0:
            dev = PurePursuit()
        elif fam == 1:
            dev = ConstantHeading(float(rng.uniform(-math.pi, 0.0)))
        else:
            dev = PerturbedHeading(EquilibriumDefender(cfg), float(rng.uniform(0.05, 0.5)))
        runs.append(("defender", dev.name, payoff(EquilibriumIntruder(cfg), dev)))

    worst, worst_run = 0.0, None
    for side, name, val in runs:
        excess = (base - val) if side == "intruder" else (val - base)
        if excess - tol > worst:
            worst, worst_run = excess - tol, (side, name, val)
    details = {"baseline": base, "tol": tol, "runs": [list(r) for r in runs], "violation": worst_run}
    return VerificationReport("saddle", 1 + len(runs), worst, s0, 0.0, seed, details)


SUITES = ("grad", "hji", "saddle", "oracles", "all")
S1_STATE = (0.5, 0.1, 0.1, 0.9)


def run_suite(name: str, cfg: GameConfig | None = None, seed: int = 0,
              sim: SimConfig | None = None, n_deviations: int = 4) -> list[VerificationReport]:
    """Run a named suite; ``"oracles"`` gives two reports and ``"all"`` five.

    The saddle suite plays from the S1 initial state.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    cfg = cfg or GameConfig()
    out = []
    if name in ("grad", "all"):
        out.append(grad_report(cfg, seed=seed))
    if name in ("hji", "all"):
        out.append(hji_report(cfg, seed=seed))
    if name in ("saddle", "all"):
        out.append(saddle_check(GameState.from_array(S1_STATE), cfg, sim, n_deviations, seed=seed))
    if name in ("oracles", "all"):
        out.append(value2_oracle_report(cfg, seed=seed))
        out.append(params_oracle_report(cfg, seed=seed))
    return out
