"""Command-line front end.

Subcommands
-----------
scenario  run ``s1``/``s2``/``s3`` or a JSON spec (``--config``)
levelsets export ``V_I``/``V_II`` grids, barriers and region labels
verify    run the numerical certification suites
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import fileio
from .core import GameConfig, GameState
from .openloop import InfeasiblePlanError, build_plan
from .sim import SimConfig, simulate_scenario
from .strategies import DEFENDER_STRATEGIES, INTRUDER_STRATEGIES
from .value import RegionLabel, classify_state, level_set_grid
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_DEFENDER_WIN = 3
EXIT_TIMEOUT = 4

DEFAULT_OUT = "recon_out"
S0 = (0.5, 0.1, 0.1, 0.9)


@dataclass
class ScenarioSpec:
    """Everything needed to reproduce one simulation run."""

    name: str
    initial_state: tuple = S0
    alpha: float = 1.2
    l: float = 1.0
    intruder_strategy: str = "equilibrium"
    defender_strategy: str = "equilibrium"
    dt: float = 1e-3
    max_time: float = 10.0
    output_dir: str | None = None

    def __post_init__(self):
        self.initial_state = tuple(float(v) for v in self.initial_state)
        if len(self.initial_state) != 4:
            raise ValueError("initial_state needs 4 numbers [x_I, y_I, x_D, y_D]")
        if self.intruder_strategy not in INTRUDER_STRATEGIES:
            raise ValueError(f"unknown intruder strategy {self.intruder_strategy!r}")
        if self.defender_strategy not in DEFENDER_STRATEGIES:
            raise ValueError(f"unknown defender strategy {self.defender_strategy!r}")
        self.game_config()
        self.sim_config()

    def game_config(self) -> GameConfig:
        return GameConfig(alpha=self.alpha, l=self.l)

    def sim_config(self) -> SimConfig:
        return SimConfig(dt=self.dt, max_time=self.max_time)

    def state(self) -> GameState:
        return GameState.from_array(self.initial_state)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial_state"] = list(self.initial_state)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ScenarioSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path) -> Path:
        return fileio.write_json(path, self.to_dict())


PRESETS = {
    "s1": ScenarioSpec("s1"),
    "s2": ScenarioSpec("s2", defender_strategy="pure-pursuit"),
    "s3": ScenarioSpec("s3", intruder_strategy="greedy"),
}


def _out_dir(arg, sub: str | None = None) -> Path:
    if arg:
        return Path(arg)
    base = Path(os.environ.get("RECON_OUT", DEFAULT_OUT))
    return base / sub if sub else base


def _pair(text: str, n: int, sep: str = ","):
    parts = text.lower().split(sep)
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} values separated by {sep!r}, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _resolution(text: str):
    nx, ny = _pair(text, 2, "x")
    if nx != int(nx) or ny != int(ny):
        raise argparse.ArgumentTypeError(f"resolution must be integers, got {text!r}")
    return int(nx), int(ny)


# -- scenario ---------------------------------------------------------------------

def cmd_scenario(args) -> int:
    try:
        if args.config:
            spec = ScenarioSpec.load(args.config)
        elif args.name in PRESETS:
            spec = ScenarioSpec.from_dict(PRESETS[args.name].to_dict())
        else:
            print(f"error: give a scenario name {sorted(PRESETS)} or --config", file=sys.stderr)
            return EXIT_INVALID
        if args.dt is not None:
            spec.dt = args.dt
            spec.sim_config()
        cfg, sim, s0 = spec.game_config(), spec.sim_config(), spec.state()
    except (OSError, ValueError, TypeError) as e:
        print(f"error: invalid scenario spec: {e}", file=sys.stderr)
        return EXIT_INVALID
    if s0.intruder.y <= 0:
        print("error: initial state already terminal (y_I <= 0)", file=sys.stderr)
        return EXIT_INVALID
    if classify_state(s0, cfg) is RegionLabel.DEFENDER_WIN:
        print("error: initial state lies in the Defender-win region", file=sys.stderr)
        return EXIT_DEFENDER_WIN

    out = _out_dir(args.out or spec.output_dir, spec.name)
    tr, outcome = simulate_scenario(s0, spec.intruder_strategy, spec.defender_strategy, cfg, sim)
    fileio.write_trajectory(out / "trajectory.csv", tr)
    fileio.write_min_gap(out / "min_gap.csv", tr)
    fileio.write_json(out / "outcome.json", outcome.to_dict())
    spec.save(out / "spec.json")
    try:
        fileio.write_json(out / "plan.json", build_plan(s0, cfg).to_dict())
    except InfeasiblePlanError:
        pass

    t_s = outcome.t_switch_first
    print(f"scenario {spec.name}: status={outcome.status.value} payoff={outcome.payoff:.6f} "
          f"t_s={'none' if t_s is None else f'{t_s:.6f}'} t_f={outcome.t_final:.6f}")
    print(f"wrote {out}")
    if outcome.timed_out:
        print(f"error: max_time {sim.max_time} reached without a terminal event", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


# -- levelsets --------------------------------------------------------------------

def cmd_levelsets(args) -> int:
    try:
        cfg = GameConfig(alpha=args.alpha, l=args.l)
        grid = level_set_grid(args.defender, cfg, args.bounds, args.resolution)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    out = _out_dir(args.out, "levelsets")
    fileio.write_matrix(out / "v1.csv", grid.v1_values, grid.bounds, grid.resolution)
    fileio.write_matrix(out / "v2.csv", grid.v2_values, grid.bounds, grid.resolution)
    fileio.write_matrix(out / "regions.csv", grid.regions(), grid.bounds, grid.resolution)
    fileio.write_polylines(out / "barriers_b1.csv", grid.barrier_B1)
    fileio.write_polylines(out / "barriers_b2.csv", grid.barrier_B2)
    print(f"levelsets: {grid.resolution[0]}x{grid.resolution[1]} grid, "
          f"{len(grid.barrier_B1)} B1 / {len(grid.barrier_B2)} B2 polylines; wrote {out}")
    return EXIT_OK


# -- verify -----------------------------------------------------------------------

def _fmt_state(s) -> str:
    return "none" if s is None else "[" + ", ".join(f"{v:.9g}" for v in s.as_tuple()) + "]"


def cmd_verify(args) -> int:
    sim = SimConfig(dt=args.dt) if args.dt is not None else None
    reports = run_suite(args.suite, seed=args.seed, sim=sim)
    out = _out_dir(args.out, "verify")
    ok = True
    print(f"{'suite':<15}{'samples':>8}{'max residual':>15}{'threshold':>12}  result")
    for r in reports:
        fileio.write_json(out / f"{r.name}.json", r.to_dict())
        print(f"{r.name:<15}{r.samples:>8}{r.max_abs_residual:>15.3e}{r.threshold:>12.1e}  "
              f"{'PASS' if r.passed else 'FAIL'}")
        if r.name == "saddle":
            runs = r.details["runs"]
            pp = [v for side, name, v in runs if name == "pure-pursuit"]
            gr = [v for side, name, v in runs if side == "intruder" and name == "greedy"]
            if pp and gr:
                print(f"  ordering: pure-pursuit D {pp[0]:.4f} <= equilibrium {r.details['baseline']:.4f}"
                      f" <= greedy I {gr[0]:.4f}")
        if not r.passed:
            ok = False
            print(f"  worst-case input: {_fmt_state(r.worst_case_input)}", file=sys.stderr)
    print(f"wrote {out}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="recongame", description="Two-phase reconnaissance game toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="simulate a preset or JSON-configured scenario")
    sc.add_argument("name", nargs="?", choices=sorted(PRESETS), help="preset scenario")
    sc.add_argument("--config", help="JSON scenario spec")
    sc.add_argument("--dt", type=float, help="time step (overrides the spec)")
    sc.add_argument("--out", help="output directory")
    sc.set_defaults(func=cmd_scenario)

    ls = sub.add_parser("levelsets", help="export value grids, barriers and regions")
    ls.add_argument("--defender", type=lambda t: _pair(t, 2), default=(0.0, 0.6), help="x,y (default 0,0.6)")
    ls.add_argument("--alpha", type=float, default=1.1)
    ls.add_argument("--l", type=float, default=1.0)
    ls.add_argument("--bounds", type=lambda t: _pair(t, 4), default=(-2.0, -0.5, 2.0, 1.5), help="x0,y0,x1,y1")
    ls.add_argument("--resolution", type=_resolution, default=(400, 400), help="NXxNY")
    ls.add_argument("--out", help="output directory")
    ls.set_defaults(func=cmd_levelsets)

    ve = sub.add_parser("verify", help="run verification suites")
    ve.add_argument("suite", choices=SUITES)
    ve.add_argument("--seed", type=int, default=0)
    ve.add_argument("--dt", type=float, help="time step for the saddle suite")
    ve.add_argument("--out", help="output directory")
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
