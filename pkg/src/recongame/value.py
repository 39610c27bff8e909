"""Value functions of both phases, winning regions and barriers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache

import numpy as np

from .apollonius import in_phase_two_domain
from .contour import zero_contours
from .core import GameConfig, GameState, Point2

N_SCAN = 256
_MAX_BISECT = 200


@dataclass(frozen=True)
class Phase2Solution:
    value: float
    retreat_point: Point2


class RegionLabel(IntEnum):
    DEFENDER_WIN = 0
    INTRUDER_WIN = 1
    NEGATIVE_VALUE = 2


def _slope(px, x, y):
    # d/dpx of hypot(px - x, y); the kink at px == x (y == 0) maps to 0
    # explicit sqrt so the scalar bisection below rounds identically
    d = px - x
    n = np.sqrt(d * d + y * y)
    return np.divide(d, n, out=np.zeros_like(d), where=n > 0)


def _boundary_gain(px, xI, yI, xD, yD, alpha):
    return np.hypot(px - xD, yD) - alpha * np.hypot(px - xI, yI)


def _boundary_gain_slope(px, xI, yI, xD, yD, alpha):
    return _slope(px, xD, yD) - alpha * _slope(px, xI, yI)


def _bisect_scalar(lo, hi, xI, yI, xD, yD, alpha, tol):
    # bit-identical to the vectorized branch, minus the numpy call overhead
    lo, hi = float(lo), float(hi)
    for _ in range(_MAX_BISECT):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        dD, dI = mid - xD, mid - xI
        nD = math.sqrt(dD * dD + yD * yD)
        nI = math.sqrt(dI * dI + yI * yI)
        slope = (dD / nD if nD > 0 else 0.0) - alpha * (dI / nI if nI > 0 else 0.0)
        if slope > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_retreat_points(xI, yI, xD, yD, alpha: float, tol: float = 1e-12, n_scan: int = N_SCAN):
    """Maximize ``delta`` over the line ``y = 0`` for a batch of states.

    The gain ``g(p_x)`` is scanned over ``[c_x - 4r - 1, c_x + 4r + 1]``,
    every ``+ -> -`` sign change of ``g'`` is refined by bisection, and the
    bracket with the largest ``g`` wins. States with ``y_I <= 0`` get the
    degenerate answer ``(|I - D|, x_I)``.

    Returns
    -------
    value, p_x : ndarray
    """
    xI, yI, xD, yD = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (xI, yI, xD, yD)))
    shape = xI.shape
    xI, yI, xD, yD = (v.ravel() for v in (xI, yI, xD, yD))
    a2 = alpha * alpha
    cx = (a2 * xI - xD) / (a2 - 1)
    r = alpha * np.hypot(xI - xD, yI - yD) / (a2 - 1)
    u = np.linspace(0.0, 1.0, n_scan)
    lo = cx - 4 * r - 1
    xs = lo[:, None] + (8 * r + 2)[:, None] * u[None, :]
    args = (xI[:, None], yI[:, None], xD[:, None], yD[:, None], alpha)
    gp = _boundary_gain_slope(xs, *args)
    rows, cols = np.nonzero((gp[:, :-1] > 0) & (gp[:, 1:] <= 0))

    blo = xs[rows, cols]
    bhi = xs[rows, cols + 1]
    bargs = (xI[rows], yI[rows], xD[rows], yD[rows], alpha)
    if blo.size <= 8:
        broots = np.array([_bisect_scalar(lo_, hi_, *(float(a[k]) for a in bargs[:4]), alpha, tol)
                           for k, (lo_, hi_) in enumerate(zip(blo, bhi))])
    else:
        for _ in range(_MAX_BISECT):
            active = bhi - blo > tol
            if not active.any():
                break
            mid = 0.5 * (blo + bhi)
            up = _boundary_gain_slope(mid, *bargs) > 0
            blo = np.where(active & up, mid, blo)
            bhi = np.where(active & ~up, mid, bhi)
        broots = 0.5 * (blo + bhi)
    bvals = _boundary_gain(broots, *bargs)

    # fallback: best scanned sample (covers states without a clean bracket)
    g = _boundary_gain(xs, *args)
    k = np.argmax(g, axis=1)
    idx = np.arange(xs.shape[0])
    value = g[idx, k]
    px = xs[idx, k]
    order = np.lexsort((-bvals, rows))
    first = np.ones(order.size, dtype=bool)
    first[1:] = rows[order][1:] != rows[order][:-1]
    best = order[first]
    better = bvals[best] >= value[rows[best]]
    value[rows[best][better]] = bvals[best][better]
    px[rows[best][better]] = broots[best][better]

    done = yI <= 0
    value = np.where(done, np.hypot(xI - xD, yI - yD), value)
    px = np.where(done, xI, px)
    return value.reshape(shape), px.reshape(shape)


@lru_cache(maxsize=8192)
def _value_phase2_cached(state: tuple, alpha: float, tol: float) -> tuple[float, float]:
    v, px = solve_retreat_points(*state, alpha, tol)
    return float(v), float(px)


def value_phase2(s: GameState, alpha: float, tol: float = 1e-12) -> Phase2Solution:
    """Phase-II Value ``max_{p in R} delta(s, p)`` and its maximizer.

    For ``y_I <= 0`` the game is already over; the degenerate answer
    ``|I - D|`` at ``p = I`` is returned.
    """
    if s.intruder.y <= 0:
        return Phase2Solution(s.separation, s.intruder)
    v, px = _value_phase2_cached(s.as_tuple(), float(alpha), float(tol))
    return Phase2Solution(v, Point2(px, 0.0))


def phase1_value_array(xI, yI, xD, yD, alpha: float, l: float):
    return l - 0.5 * (yI + np.sqrt((xI - xD) ** 2 / (alpha * alpha - 1) + yD**2 / (alpha * alpha)))


def value_phase1(s: GameState, cfg: GameConfig) -> float:
    """Closed-form Phase-I Value (closest approach to the target region).

    The formula is total; membership of ``s`` in the Phase-II domain is the
    caller's concern.
    """
    return float(phase1_value_array(*s.as_tuple(), cfg.alpha, cfg.l))


def classify_state(s: GameState, cfg: GameConfig) -> RegionLabel:
    if not in_phase_two_domain(s, cfg.alpha):
        return RegionLabel.DEFENDER_WIN
    if value_phase1(s, cfg) >= 0:
        return RegionLabel.INTRUDER_WIN
    return RegionLabel.NEGATIVE_VALUE


def barrier_b1_y(x: float, defender, cfg: GameConfig) -> float:
    """Intruder height on the zero level set of ``V_I`` at abscissa ``x``."""
    a2 = cfg.alpha * cfg.alpha
    xD, yD = defender
    return 2 * cfg.l - math.sqrt((x - xD) ** 2 / (a2 - 1) + yD * yD / a2)


@dataclass
class LevelSetGrid:
    """``V_I`` and ``V_II`` sampled over Intruder positions, Defender fixed.

    Value matrices have shape ``(ny, nx)``; row ``j`` is ``y = ys[j]``.
    """

    bounds: tuple[float, float, float, float]
    resolution: tuple[int, int]
    v1_values: np.ndarray
    v2_values: np.ndarray
    barrier_B1: list = field(default_factory=list)
    barrier_B2: list = field(default_factory=list)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.bounds[0], self.bounds[2], self.resolution[0])

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.bounds[1], self.bounds[3], self.resolution[1])

    @property
    def cell_diagonal(self) -> float:
        x0, y0, x1, y1 = self.bounds
        nx, ny = self.resolution
        return math.hypot((x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1))

    def regions(self) -> np.ndarray:
        labels = np.full(self.v1_values.shape, int(RegionLabel.NEGATIVE_VALUE), dtype=int)
        inside = self.v2_values >= 0
        labels[inside & (self.v1_values >= 0)] = int(RegionLabel.INTRUDER_WIN)
        labels[~inside] = int(RegionLabel.DEFENDER_WIN)
        return labels


def level_set_grid(defender, cfg: GameConfig, bounds=(-2.0, -0.5, 2.0, 1.5),
                   resolution=(400, 400), chunk: int = 8192) -> LevelSetGrid:
    x0, y0, x1, y1 = (float(b) for b in bounds)
    nx, ny = (int(n) for n in resolution)
    if nx < 2 or ny < 2:
        raise ValueError(f"resolution must be at least 2x2, got {nx}x{ny}")
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"bounds must have positive area, got {bounds}")
    xD, yD = (float(v) for v in defender)
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    v1 = phase1_value_array(X, Y, xD, yD, cfg.alpha, cfg.l)

    # row-major chunks; result independent of chunking
    flat_x, flat_y = X.ravel(), Y.ravel()
    v2 = np.empty(flat_x.size)
    for i in range(0, flat_x.size, chunk):
        v2[i:i + chunk], _ = solve_retreat_points(
            flat_x[i:i + chunk], flat_y[i:i + chunk], xD, yD, cfg.alpha, cfg.solver_tol)
    v2 = v2.reshape(X.shape)

    xs, ys = X[0], Y[:, 0]
    grid = LevelSetGrid((x0, y0, x1, y1), (nx, ny), v1, v2)
    # B_I only exists inside the Phase-II domain
    grid.barrier_B1 = zero_contours(xs, ys, np.where(v2 >= 0, v1, np.nan))
    grid.barrier_B2 = zero_contours(xs, ys, v2)
    return grid
