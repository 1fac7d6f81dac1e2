"""Pinching-antenna SWIPT toolkit.

NOMA power allocation (exact LP) and antenna placement (element-wise grid
search or LDW-PSO) for a waveguide with pinching antennas serving
information and energy receivers, plus fixed-antenna baselines and a sweep
harness.
"""
from .channel import PhysicalConstants, Point3, aggregate_gain, channel_gain
from .config import load_default_scenario, parse_scenario, serialize_scenario
from .driver import (AlternationConfig, SolveReport, alternate, baseline_fixed, baseline_mimo)
from .errors import DegenerateGeometryError, ScenarioError, SolverError
from .kernels import BACKEND
from .position import (ElementWiseConfig, PositionResult, PsoConfig, elementwise_optimize,
                       pso_optimize)
from .power import build_lp, optimize_powers, solve_lp
from .system import Scenario, evaluate, reference_scenario

__all__ = [
    "BACKEND", "AlternationConfig", "DegenerateGeometryError", "ElementWiseConfig",
    "PhysicalConstants", "Point3", "PositionResult", "PsoConfig", "Scenario", "ScenarioError",
    "SolveReport", "SolverError", "aggregate_gain", "alternate", "baseline_fixed",
    "baseline_mimo", "build_lp", "channel_gain", "elementwise_optimize", "evaluate",
    "load_default_scenario", "optimize_powers", "reference_scenario", "parse_scenario",
    "pso_optimize", "serialize_scenario", "solve_lp",
]
