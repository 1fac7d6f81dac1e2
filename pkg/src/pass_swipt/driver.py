"""Alternating optimization of power allocation and antenna positions.

Each outer iteration moves the antennas with the allocation held fixed, then
re-solves the allocation LP on the new layout (which also re-derives the SIC
order). The allocation from the previous LP stays feasible for the moved
layout, so the LP optimum can only go up and the objective trajectory is
monotone. A step that would lower it is rejected and the loop stops.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .position import ElementWiseConfig, PsoConfig, elementwise_optimize, pso_optimize
from .power import LpSolution, optimize_powers, sic_split
from .system import Scenario, check_layout, decoding_order, evaluate, uniform_layout

ALGORITHMS = ("elementwise", "pso")


@dataclass(frozen=True)
class AlternationConfig:
    max_outer_iters: int = 20
    rel_tol: float = 1e-4
    position_algorithm: str = "elementwise"
    init_strategy: str = "uniform"  # or "random"
    seed: int | None = 0
    restarts: int = 5
    elementwise: ElementWiseConfig = field(default_factory=ElementWiseConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.position_algorithm not in ALGORITHMS:
            raise ValueError(f"position_algorithm must be one of {ALGORITHMS}")
        if self.init_strategy not in ("uniform", "random"):
            raise ValueError("init_strategy must be 'uniform' or 'random'")


@dataclass
class SolveReport:
    algorithm: str
    status: str  # "converged" | "iteration-capped" | "infeasible"
    layout: np.ndarray | None = None
    allocation: np.ndarray | None = None
    objective: float = float("nan")
    trajectory: list = field(default_factory=list)
    sinr: np.ndarray | None = None
    harvested: np.ndarray | None = None
    outer_iterations: int = 0
    wall_time: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else [float(v) for v in a]

        return {
            "algorithm": self.algorithm,
            "status": self.status,
            "objective_w": None if not self.feasible else float(self.objective),
            "layout_m": arr(self.layout),
            "allocation_w": arr(self.allocation),
            "trajectory_w": [float(v) for v in self.trajectory],
            "sinr": arr(self.sinr),
            "harvested_w": arr(self.harvested),
            "outer_iterations": self.outer_iterations,
            "wall_time_s": self.wall_time,
        }


def _finish(report: SolveReport, scenario: Scenario, start: float) -> SolveReport:
    if report.feasible:
        state = evaluate(scenario, report.layout, report.allocation)
        report.objective = state.objective
        report.sinr = state.sinr
        report.harvested = state.harvested
    report.wall_time = time.perf_counter() - start
    return report


def random_layout(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    xs = rng.uniform(0.0, scenario.waveguide_length, size=(1, scenario.num_antennas))
    kernels.repair_spacing(xs, None, scenario.min_spacing, scenario.waveguide_length)
    return xs[0]


def _position_step(scenario, alloc, layout, order, cfg: AlternationConfig, rng):
    if cfg.position_algorithm == "elementwise":
        return elementwise_optimize(scenario, alloc, layout, cfg.elementwise, order=order)
    return pso_optimize(scenario, alloc, cfg.pso, init_layout=layout, order=order, rng=rng)


def _initial_point(scenario, cfg, rng, init_layout=None):
    """First layout with a feasible allocation LP, or ``None``.

    Tries ``init_layout`` (or the configured start) then ``cfg.restarts``
    random layouts. When the
    LP is infeasible at a start, one position step is run at a SIC-ratio
    power split (feasible-first ranking pulls the layout toward the floors)
    and the LP is retried there.
    """
    for attempt in range(1 + cfg.restarts):
        if attempt == 0 and init_layout is not None:
            layout = np.array(init_layout, dtype=np.float64)
        elif attempt == 0 and cfg.init_strategy == "uniform":
            layout = uniform_layout(scenario)
        else:
            layout = random_layout(scenario, rng)
        sol = optimize_powers(scenario, layout)
        if sol.optimal:
            return layout, sol
        order = decoding_order(scenario, layout)
        res = _position_step(scenario, sic_split(scenario, order), layout, order, cfg, rng)
        sol = optimize_powers(scenario, res.layout)
        if sol.optimal:
            return res.layout, sol
    return None


def alternate(scenario: Scenario, cfg: AlternationConfig | None = None,
              init_layout=None) -> SolveReport:
    """Jointly optimize layout and allocation by alternation.

    ``init_layout`` overrides ``cfg.init_strategy`` for the first start.

    ``trajectory[k]`` is the objective after ``k`` outer iterations (entry 0
    is the starting layout with its optimal allocation). Stops when an
    iteration gains less than ``rel_tol`` relatively, when a step is
    rejected, or after ``max_outer_iters``.
    """
    cfg = cfg or AlternationConfig()
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    report = SolveReport(cfg.position_algorithm, "infeasible")
    if init_layout is not None:
        spacing_ok, bounds_ok = check_layout(scenario, init_layout)
        if len(init_layout) != scenario.num_antennas or not (spacing_ok and bounds_ok):
            raise ValueError("init_layout violates spacing or waveguide bounds")
    start = _initial_point(scenario, cfg, rng, init_layout)
    if start is None:
        return _finish(report, scenario, t0)

    layout, sol = start
    trajectory = [sol.objective]
    status = "iteration-capped"
    iters = 0
    for _ in range(cfg.max_outer_iters):
        iters += 1
        order = decoding_order(scenario, layout)
        res = _position_step(scenario, sol.allocation, layout, order, cfg, rng)
        new: LpSolution = optimize_powers(scenario, res.layout) if res.feasible else None
        if new is None or not new.optimal or new.objective < trajectory[-1]:
            status = "converged"
            break
        layout, sol = res.layout, new
        trajectory.append(sol.objective)
        if trajectory[-1] - trajectory[-2] <= cfg.rel_tol * abs(trajectory[-2]):
            status = "converged"
            break

    report = SolveReport(cfg.position_algorithm, status, np.asarray(layout), sol.allocation,
                         trajectory=trajectory, outer_iterations=iters)
    return _finish(report, scenario, t0)


def _fixed_layout_report(name, scenario, layout, t0):
    sol = optimize_powers(scenario, layout)
    if not sol.optimal:
        return _finish(SolveReport(name, "infeasible", outer_iterations=1), scenario, t0)
    report = SolveReport(name, "converged", np.asarray(layout, dtype=np.float64),
                         sol.allocation, trajectory=[sol.objective], outer_iterations=1)
    return _finish(report, scenario, t0)


def mimo_layout(scenario: Scenario) -> np.ndarray:
    """M antennas packed at minimum spacing starting from the feed point."""
    steps = scenario.min_spacing * np.arange(scenario.num_antennas)
    if scenario.feed_x + steps[-1] <= scenario.waveguide_length:
        return scenario.feed_x + steps
    return scenario.feed_x - steps


def baseline_mimo(scenario: Scenario) -> SolveReport:
    """Antennas frozen next to the feed point; only the allocation is optimized."""
    t0 = time.perf_counter()
    return _fixed_layout_report("mimo", scenario, mimo_layout(scenario), t0)


def baseline_fixed(scenario: Scenario) -> SolveReport:
    """One antenna at the feed point carrying the whole budget."""
    t0 = time.perf_counter()
    single = scenario.replace(num_antennas=1)
    return _fixed_layout_report("fixed", single, np.array([scenario.feed_x]), t0)
