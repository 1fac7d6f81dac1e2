"""Antenna position optimization at a fixed power allocation.

Two searches over the layout:

* :func:`elementwise_optimize` -- coordinate ascent where each antenna is
  moved to the best point of a uniform grid on the waveguide while the others
  stay put, sweeping until the objective stops improving. Cost per sweep is
  O(D M).
* :func:`pso_optimize` -- particle swarm with an inertia weight falling
  linearly from ``w_max`` to ``w_min`` and cognitive/social weights redrawn
  every iteration. Cost is O(P M t_max).

Both keep the SIC decoding order fixed (the order the allocation was computed
for) and treat the SINR floors, energy floors and that order as constraints.
Candidates are compared feasible-first: any feasible layout beats any
infeasible one, feasible layouts are ranked by objective and infeasible ones
by total relative violation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .system import (Scenario, check_layout, decoding_order, evaluate, receivers_array,
                     uniform_layout)


@dataclass(frozen=True)
class ElementWiseConfig:
    grid_points: int = 4096
    max_sweeps: int = 20
    tol: float = 1e-6

    def __post_init__(self):
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 10
    max_iters: int = 300
    w_max: float = 0.9
    w_min: float = 0.4
    c1: float = 2.0
    c2: float = 2.0
    v_max: float | None = None  # default 0.2 * waveguide length
    seed: int | None = 0
    best_update: str = "swarm"  # or "element"

    def __post_init__(self):
        if self.swarm_size < 1 or self.max_iters < 1:
            raise ValueError("swarm_size and max_iters must be >= 1")
        if not self.w_max >= self.w_min >= 0:
            raise ValueError("need w_max >= w_min >= 0")
        if self.v_max is not None and self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if self.best_update not in ("element", "swarm"):
            raise ValueError("best_update must be 'element' or 'swarm'")


@dataclass
class PositionResult:
    layout: np.ndarray
    objective: float
    feasible: bool
    history: list = field(default_factory=list)
    status: str = "ok"


class _Problem:
    """Kernel arguments for one (scenario, allocation, frozen order)."""

    def __init__(self, scenario: Scenario, alloc, order):
        self.scenario = scenario
        self.order = tuple(int(i) for i in order)
        idx = list(self.order)
        self.alloc = np.asarray(alloc, dtype=np.float64)
        self.rx = np.vstack([receivers_array(scenario.ers), receivers_array(scenario.irs)[idx]])
        self.n_er = scenario.num_ers
        self.power = np.ascontiguousarray(self.alloc[idx])
        self.noise = np.asarray(scenario.noise_power, dtype=np.float64)[idx]
        c = scenario.consts
        self.geometry = (scenario.height, scenario.feed_x, c.wavelength, c.guided_wavelength, c.eta)

    def gains(self, layouts):
        return kernels.aggregate_gains(np.atleast_2d(layouts), self.rx, *self.geometry)

    def score(self, gains):
        s = self.scenario
        return kernels.score_gains(gains, self.n_er, self.power, self.noise,
                                   s.sinr_floor, s.energy_floor)

    def evaluate(self, layout):
        return evaluate(self.scenario, layout, self.alloc, self.order)


def inertia_schedule(t, t_max, w_max, w_min):
    """Inertia weight at iteration ``t``: ``w_max`` at 0 falling linearly to ``w_min`` at ``t_max``."""
    return w_max - (w_max - w_min) * t / t_max


def weight_draw(c0, rng):
    """Randomised acceleration weight ``c0 * U[0, 1]``."""
    return c0 * rng.random()


def pso_velocity_update(position, velocity, personal_best, global_best, w, c1, c2, rng, v_max):
    """One velocity step for a single particle, clipped to ``[-v_max, v_max]``.

    Draws two uniforms per dimension from ``rng``, dimension by dimension,
    cognitive before social; the same stream order :func:`pso_optimize` uses.
    """
    position = np.asarray(position, dtype=np.float64)
    r = rng.random((position.size, 2))
    v = np.asarray(velocity, dtype=np.float64) * w
    v = v + c1 * r[:, 0] * (np.asarray(personal_best) - position)
    v = v + c2 * r[:, 1] * (np.asarray(global_best) - position)
    return np.clip(v, -v_max, v_max)


def _check_init(scenario, layout):
    xs = np.array(layout, dtype=np.float64)
    if xs.shape != (scenario.num_antennas,):
        raise ValueError(f"layout must have {scenario.num_antennas} entries")
    spacing_ok, bounds_ok = check_layout(scenario, xs)
    if not (spacing_ok and bounds_ok):
        raise ValueError("initial layout violates spacing or waveguide bounds")
    return xs


def elementwise_optimize(scenario: Scenario, alloc, init_layout, cfg=None, order=None) -> PositionResult:
    """Coordinate ascent over a uniform grid of ``cfg.grid_points`` positions.

    Grid points are ``k * D_w / (D - 1)`` for ``k = 0..D-1``. Antennas are
    visited in index order; a grid point closer than the minimum spacing to
    another antenna is skipped. A move is accepted only if it strictly beats
    the current layout, so the objective never decreases. Sweeps stop when the
    relative gain of a sweep drops below ``cfg.tol`` or after ``cfg.max_sweeps``.

    ``order`` is the frozen SIC order; it defaults to the one ``init_layout``
    induces. ``history`` holds the objective after every sweep, starting with
    the initial layout.
    """
    cfg = cfg or ElementWiseConfig()
    xs = _check_init(scenario, init_layout)
    if order is None:
        order = decoding_order(scenario, xs)
    prob = _Problem(scenario, alloc, order)
    grid = np.linspace(0.0, scenario.waveguide_length, cfg.grid_points)
    grid_h = prob.gains(grid[:, None])
    contrib = prob.gains(xs[:, None])
    spacing = scenario.min_spacing

    def current():
        obj, viol = prob.score(contrib.sum(axis=0)[None, :])
        return obj[0], viol[0]

    obj, viol = current()
    history = [float(obj)]
    for _ in range(cfg.max_sweeps):
        start = obj
        for m in range(len(xs)):
            base = contrib.sum(axis=0) - contrib[m]
            cand_obj, cand_viol = prob.score(base + grid_h)
            others = np.delete(xs, m)
            if others.size:
                clear = np.abs(grid[:, None] - others[None, :]).min(axis=1) >= spacing
                cand_viol = np.where(clear, cand_viol, np.inf)
            k = kernels.best_index(cand_obj, cand_viol)
            if not np.isfinite(cand_viol[k]):
                continue
            # relative margin keeps rounding noise from triggering moves
            if cand_viol[k] == 0 and viol == 0:
                accept = cand_obj[k] > obj * (1 + 1e-12)
            else:
                accept = bool(kernels.better(cand_obj[k], cand_viol[k], obj, viol))
            if accept:
                old_x, old_h = xs[m], contrib[m].copy()
                xs[m] = grid[k]
                contrib[m] = grid_h[k]
                new_obj, new_viol = current()
                if bool(kernels.better(obj, viol, new_obj, new_viol)):
                    # recomputed sum fell behind the incumbent
                    xs[m], contrib[m] = old_x, old_h
                    continue
                obj, viol = new_obj, new_viol
        history.append(float(obj))
        gain = obj - start
        if viol == 0 and (start <= 0 or gain <= cfg.tol * abs(start)):
            break

    state = prob.evaluate(xs)
    return PositionResult(xs, state.objective, viol == 0, history,
                          "ok" if viol == 0 else "no feasible layout found")


def pso_optimize(scenario: Scenario, alloc, cfg=None, init_layout=None, order=None,
                 rng=None) -> PositionResult:
    """LDW-PSO over antenna layouts at a fixed allocation.

    Particles start uniformly on ``[0, D_w]^M`` with zero velocity; when
    ``init_layout`` is given it replaces particle 0 so the result can never be
    worse than the starting layout. After every move positions are clipped to
    the waveguide (velocity zeroed where clipped) and spacing is restored by
    least-squares projection.

    Random stream: ``P*M`` initial positions, then per iteration ``c1``,
    ``c2`` and two uniforms per particle per dimension (particles in index
    order, dimensions in index order, cognitive before social).

    With ``cfg.best_update == "element"`` the personal and global bests are
    also improved one coordinate at a time (see ``kernels.pso_loop``);
    ``"swarm"`` keeps the classic whole-vector update only.

    ``history`` is the global-best objective after every iteration.
    """
    cfg = cfg or PsoConfig()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    m = scenario.num_antennas
    upper = scenario.waveguide_length
    v_max = cfg.v_max if cfg.v_max is not None else 0.2 * upper
    if init_layout is not None:
        init_layout = _check_init(scenario, init_layout)
    if order is None:
        order = decoding_order(scenario, init_layout if init_layout is not None
                               else uniform_layout(scenario))
    prob = _Problem(scenario, alloc, order)

    positions = rng.uniform(0.0, upper, size=(cfg.swarm_size, m))
    if init_layout is not None:
        positions[0] = init_layout
    kernels.repair_spacing(positions, None, scenario.min_spacing, upper)
    velocity = np.zeros_like(positions)
    draws = rng.random((cfg.max_iters, 2 + 2 * cfg.swarm_size * m))
    return run_swarm(prob, positions, velocity, draws, cfg, v_max)


def run_swarm(prob, positions, velocity, draws, cfg, v_max) -> PositionResult:
    """Drive the compiled/fallback PSO loop on an explicit swarm state."""
    s = prob.scenario
    best, _, best_viol, hist = kernels.pso_loop(
        positions, velocity, draws, prob.rx, prob.n_er, *prob.geometry,
        prob.power, prob.noise, s.sinr_floor, s.energy_floor,
        cfg.w_max, cfg.w_min, cfg.c1, cfg.c2, v_max, s.waveguide_length, s.min_spacing,
        cfg.best_update == "element")
    state = prob.evaluate(best)
    feasible = best_viol == 0
    return PositionResult(np.array(best), state.objective, feasible, hist[:, 0].tolist(),
                          "ok" if feasible else "no feasible layout found")
