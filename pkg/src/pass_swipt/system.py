"""SWIPT semantics: harvested power, SIC order, SINR and constraint checks.

Conventions
-----------
* ``layout`` is a length-M array of antenna x-coordinates on the waveguide.
* ``alloc`` is a length-K_I array of per-antenna powers ``p_i``; the base
  station radiates ``M * sum(p)`` in total and every antenna carries the
  same superposed signal.
* Decoding orders list IR indices from the weakest aggregate channel to the
  strongest. Interference for the IR at order position ``k`` comes from the
  IRs at positions ``k+1, ...``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import PhysicalConstants, Point3, aggregate_gain
from .errors import ScenarioError

#: Relative slack on the SINR, energy and budget constraints.
REL_SLACK = 1e-9
#: Absolute slack (metres) on antenna spacing and waveguide bounds.
ABS_SLACK_M = 1e-12


@dataclass(frozen=True)
class Scenario:
    """Physical layout, QoS targets and power budget of one SWIPT instance.

    All quantities are SI: metres, watts, hertz; ``sinr_floor`` is linear.
    ``noise_power`` holds one entry per IR.
    """

    irs: tuple[Point3, ...]
    ers: tuple[Point3, ...]
    consts: PhysicalConstants = field(default_factory=PhysicalConstants)
    waveguide_length: float = 10.0
    height: float = 3.0
    region: tuple[float, float] = (10.0, 6.0)
    min_spacing: float | None = None
    num_antennas: int = 4
    feed_x: float = 0.0
    power_budget: float = 10.0
    noise_power: tuple[float, ...] | float = 1e-12
    sinr_floor: float = 10 ** 1.5
    energy_floor: float = 1e-7

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "irs", tuple(Point3(*map(float, p)) for p in self.irs))
        set_(self, "ers", tuple(Point3(*map(float, p)) for p in self.ers))
        set_(self, "region", tuple(float(v) for v in self.region))
        if self.min_spacing is None:
            set_(self, "min_spacing", self.consts.wavelength / 2)
        noise = self.noise_power
        if np.isscalar(noise):
            noise = (float(noise),) * len(self.irs)
        set_(self, "noise_power", tuple(float(v) for v in noise))
        self._validate()

    def _validate(self):
        def need(ok, path, msg):
            if not ok:
                raise ScenarioError(msg, path)

        need(isinstance(self.num_antennas, (int, np.integer)) and self.num_antennas >= 1,
             "num_antennas", "must be an integer >= 1")
        need(self.waveguide_length > 0, "waveguide_length", "must be positive")
        need(self.height > 0, "height", "must be positive")
        need(self.min_spacing > 0, "min_spacing", "must be positive")
        need(self.num_antennas * self.min_spacing <= self.waveguide_length,
             "min_spacing", "num_antennas * min_spacing exceeds the waveguide length")
        need(0 <= self.feed_x <= self.waveguide_length, "feed_x", "must lie on the waveguide")
        need(self.power_budget > 0, "power_budget", "must be positive")
        need(self.sinr_floor > 0, "sinr_floor", "must be positive")
        need(self.energy_floor >= 0, "energy_floor", "must be non-negative")
        need(len(self.irs) >= 1, "irs", "need at least one information receiver")
        need(len(self.ers) >= 1, "ers", "need at least one energy receiver")
        need(len(self.noise_power) == len(self.irs), "noise_power", "one entry per IR required")
        need(all(v > 0 for v in self.noise_power), "noise_power", "must be positive")
        dx, dy = self.region
        need(dx > 0 and dy > 0, "region", "must be positive")
        for name in ("irs", "ers"):
            for i, p in enumerate(getattr(self, name)):
                need(all(math.isfinite(c) for c in p), f"{name}[{i}]", "non-finite coordinate")
                need(0 <= p.x <= dx and 0 <= p.y <= dy and p.z == 0, f"{name}[{i}]",
                     "receiver must lie in the ground region [0, D_x] x [0, D_y] x {0}")

    @property
    def num_irs(self) -> int:
        return len(self.irs)

    @property
    def num_ers(self) -> int:
        return len(self.ers)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


def reference_scenario(irs=None, ers=None, **overrides) -> Scenario:
    """Scenario with the reference parameter set (M=4, 28 GHz, 40 dBm, ...).

    Receivers default to a fixed, feasible-looking placement; pass ``irs`` and
    ``ers`` to override.
    """
    if irs is None:
        irs = [(2.0, 1.5, 0.0), (7.0, 4.0, 0.0)]
    if ers is None:
        ers = [(4.0, 2.0, 0.0), (8.5, 1.0, 0.0)]
    return Scenario(irs=irs, ers=ers, **overrides)


def sample_receivers(rng: np.random.Generator, count: int, region) -> tuple[Point3, ...]:
    dx, dy = region
    xy = rng.uniform(0.0, 1.0, size=(count, 2)) * (dx, dy)
    return tuple(Point3(float(x), float(y), 0.0) for x, y in xy)


def receivers_array(points: Sequence[Point3]) -> np.ndarray:
    return np.array([tuple(p) for p in points], dtype=np.float64).reshape(-1, 3)


def check_layout(scenario: Scenario, layout) -> tuple[bool, bool]:
    """Return ``(spacing_ok, bounds_ok)`` for the layout."""
    xs = np.asarray(layout, dtype=np.float64)
    bounds_ok = bool(np.all(xs >= -ABS_SLACK_M) and np.all(xs <= scenario.waveguide_length + ABS_SLACK_M))
    srt = np.sort(xs)
    spacing_ok = bool(np.all(np.diff(srt) >= scenario.min_spacing - ABS_SLACK_M))
    return spacing_ok, bounds_ok


def uniform_layout(scenario: Scenario) -> np.ndarray:
    """Antennas at the centres of M equal segments of the waveguide."""
    m = scenario.num_antennas
    return (np.arange(m) + 0.5) * scenario.waveguide_length / m


def channel_power(scenario: Scenario, layout, receiver: Point3) -> float:
    """``|sum_m h_m|^2`` at one receiver."""
    h = aggregate_gain(layout, scenario.feed_x, receiver, scenario.height, scenario.consts)
    return h.real * h.real + h.imag * h.imag


def ir_gains(scenario: Scenario, layout) -> np.ndarray:
    return np.array([channel_power(scenario, layout, p) for p in scenario.irs])


def er_gains(scenario: Scenario, layout) -> np.ndarray:
    return np.array([channel_power(scenario, layout, p) for p in scenario.ers])


def harvested_power(scenario: Scenario, layout, alloc, er_index: int) -> float:
    """Power collected at ER ``er_index``; noise is neglected."""
    total = float(np.sum(alloc))
    return total * channel_power(scenario, layout, scenario.ers[er_index])


def decoding_order(scenario: Scenario, layout, gains=None) -> tuple[int, ...]:
    """IR indices sorted by aggregate channel gain, weakest first.

    Ties go to the lower IR index.
    """
    if gains is None:
        gains = ir_gains(scenario, layout)
    return tuple(int(i) for i in np.argsort(gains, kind="stable"))


def interference_powers(alloc, order) -> np.ndarray:
    """Sum of powers of the IRs decoded after each order position."""
    p = np.asarray(alloc, dtype=np.float64)[list(order)]
    later = np.zeros_like(p)
    for k in range(len(p) - 2, -1, -1):
        later[k] = later[k + 1] + p[k + 1]
    return later


def sinr(scenario: Scenario, layout, alloc, order, position: int, gains=None) -> float:
    """SINR of the IR at ``position`` in the decoding order."""
    if gains is None:
        gains = ir_gains(scenario, layout)
    i = order[position]
    g = gains[i]
    later = interference_powers(alloc, order)[position]
    return float(alloc[i] * g / (g * later + scenario.noise_power[i]))


@dataclass(frozen=True)
class SystemState:
    """Evaluated state of a (layout, allocation) pair.

    ``sinr`` and ``ir_gains`` are indexed by IR, ``harvested`` by ER.
    """

    objective: float
    sinr: np.ndarray
    harvested: np.ndarray
    ir_gains: np.ndarray
    order: tuple[int, ...]
    sinr_ok: bool
    energy_ok: bool
    budget_ok: bool
    spacing_ok: bool
    bounds_ok: bool
    order_ok: bool

    @property
    def feasible(self) -> bool:
        return (self.sinr_ok and self.energy_ok and self.budget_ok and self.spacing_ok
                and self.bounds_ok and self.order_ok)

    def flags(self) -> dict:
        return {name: getattr(self, name) for name in
                ("sinr_ok", "energy_ok", "budget_ok", "spacing_ok", "bounds_ok", "order_ok")}


def evaluate(scenario: Scenario, layout, alloc, order=None) -> SystemState:
    """Objective and every constraint family for one operating point.

    If ``order`` is given it is checked against the channel gains (the SIC
    ordering constraint) and used for the SINRs; otherwise the order is
    derived from the layout and holds by construction. Infeasibility is
    reported through the flags, never raised.
    """
    layout = np.asarray(layout, dtype=np.float64)
    alloc = np.asarray(alloc, dtype=np.float64)
    g_ir = ir_gains(scenario, layout)
    g_er = er_gains(scenario, layout)
    if order is None:
        order = decoding_order(scenario, layout, g_ir)
        order_ok = True
    else:
        order = tuple(int(i) for i in order)
        ordered = g_ir[list(order)]
        order_ok = bool(np.all(ordered[:-1] <= ordered[1:] * (1 + REL_SLACK)))

    total = float(np.sum(alloc))
    harvested = total * g_er
    objective = float(np.sum(harvested))
    later = interference_powers(alloc, order)
    sinrs = np.empty(len(g_ir))
    for k, i in enumerate(order):
        sinrs[i] = alloc[i] * g_ir[i] / (g_ir[i] * later[k] + scenario.noise_power[i])
    sinr_ok = bool(np.all(sinrs >= scenario.sinr_floor * (1 - REL_SLACK)))
    energy_ok = bool(np.all(harvested >= scenario.energy_floor * (1 - REL_SLACK)))
    budget_ok = bool(np.all(alloc >= 0)
                     and scenario.num_antennas * total <= scenario.power_budget * (1 + REL_SLACK))
    spacing_ok, bounds_ok = check_layout(scenario, layout)
    if len(layout) != scenario.num_antennas:
        spacing_ok = False
    return SystemState(objective, sinrs, harvested, g_ir, order, sinr_ok, energy_ok,
                       budget_ok, spacing_ok, bounds_ok, order_ok)
