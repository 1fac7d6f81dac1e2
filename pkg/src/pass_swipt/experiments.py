"""Parameter sweeps over grid size, power budget or antenna count.

Seeding
-------
Receiver drops depend only on ``(base_seed, trial)``, so every sweep value
sees the same drops and trends compare like with like. The solver stream of
a row is derived from ``(base_seed, value, trial)`` with
:class:`numpy.random.SeedSequence`, so any single row can be replayed
without running the rest of the sweep.
"""
from __future__ import annotations

import csv
import io
import json
import math
import struct
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .config import dbm_to_watts, watts_to_dbm
from .driver import AlternationConfig, alternate, baseline_fixed, baseline_mimo
from .errors import SolverError
from .position import ElementWiseConfig, PsoConfig
from .system import Scenario, sample_receivers

PARAMETERS = ("D", "P_B", "M")
ALGORITHMS = ("elementwise", "pso", "mimo", "fixed")


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.

    ``parameter`` is ``"D"`` (grid points, integer), ``"P_B"`` (power budget
    in dBm) or ``"M"`` (antenna count, integer).
    """

    parameter: str
    values: tuple
    trials: int = 100
    base_seed: int = 0
    algorithms: tuple = ALGORITHMS
    grid_points: int = 4096
    pso_iters: int = 300
    pso_swarm: int = 10
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.parameter not in PARAMETERS:
            raise ValueError(f"parameter must be one of {PARAMETERS}")
        if not self.values:
            raise ValueError("values must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms or set(self.algorithms) - set(ALGORITHMS):
            raise ValueError(f"algorithms must be a nonempty subset of {ALGORITHMS}")
        if self.parameter in ("D", "M"):
            if any(int(v) != v for v in self.values):
                raise ValueError(f"{self.parameter} values must be integers")
            object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        else:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass
class ResultRow:
    parameter: str
    value: float
    algorithm: str
    trial: int
    seed: int
    status: str
    objective_w: float
    objective_dbm: float
    outer_iterations: int
    wall_time_s: float | None = None


def _value_key(value) -> int:
    return int.from_bytes(struct.pack(">d", float(value)), "big")


def solver_seed(base_seed: int, value, trial: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(_value_key(value), trial))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def trial_scenario(base: Scenario, spec: SweepSpec, value, trial: int) -> Scenario:
    """Base scenario with fresh receivers for ``trial`` and the swept value applied."""
    rng = np.random.default_rng([spec.base_seed, trial])
    irs = sample_receivers(rng, base.num_irs, base.region)
    ers = sample_receivers(rng, base.num_ers, base.region)
    changes = {"irs": irs, "ers": ers}
    if spec.parameter == "P_B":
        changes["power_budget"] = dbm_to_watts(value)
    elif spec.parameter == "M":
        changes["num_antennas"] = int(value)
    return base.replace(**changes)


def alternation_config(spec: SweepSpec, value, algorithm: str, seed: int) -> AlternationConfig:
    d = int(value) if spec.parameter == "D" else spec.grid_points
    return AlternationConfig(
        position_algorithm=algorithm, seed=seed,
        elementwise=ElementWiseConfig(grid_points=d),
        pso=PsoConfig(swarm_size=spec.pso_swarm, max_iters=spec.pso_iters, seed=seed),
    )


def run_one(base: Scenario, spec: SweepSpec, value, algorithm: str, trial: int) -> ResultRow:
    """One (value, algorithm, trial) cell; infeasibility and solver failures become row statuses."""
    seed = solver_seed(spec.base_seed, value, trial)
    scenario = trial_scenario(base, spec, value, trial)
    try:
        if algorithm == "mimo":
            report = baseline_mimo(scenario)
        elif algorithm == "fixed":
            report = baseline_fixed(scenario)
        else:
            report = alternate(scenario, alternation_config(spec, value, algorithm, seed))
        status, obj, iters = report.status, report.objective, report.outer_iterations
        wall = report.wall_time
    except SolverError:
        status, obj, iters, wall = "solver-error", math.nan, 0, None
    if status in ("infeasible", "solver-error"):
        obj = math.nan
    return ResultRow(spec.parameter, value, algorithm, trial, seed, status, float(obj),
                     watts_to_dbm(obj) if obj > 0 else math.nan, iters,
                     wall if spec.timing else None)


def run_sweep(spec: SweepSpec, base: Scenario) -> list[ResultRow]:
    """All rows, ordered by value, then trial, then algorithm."""
    return [run_one(base, spec, value, algo, trial)
            for value in spec.values
            for trial in range(spec.trials)
            for algo in spec.algorithms]


def replay(row: ResultRow, spec: SweepSpec, base: Scenario) -> ResultRow:
    """Recompute a single exported row from its coordinates."""
    value = int(row.value) if spec.parameter in ("D", "M") else float(row.value)
    return run_one(base, spec, value, row.algorithm, int(row.trial))


# --- export -------------------------------------------------------------

COLUMNS = [f.name for f in fields(ResultRow)]
_INT_COLUMNS = {"trial", "seed", "outer_iterations"}
_FLOAT_COLUMNS = {"objective_w", "objective_dbm", "wall_time_s"}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def _json_number(value):
    # NaN/inf are not JSON; keep them as strings so the file stays standard
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, float):
        return float(format(value, ".17g"))
    return value


def rows_to_json(rows) -> str:
    data = [{k: _json_number(v) for k, v in asdict(r).items()} for r in rows]
    return json.dumps(data, indent=1, allow_nan=False) + "\n"


def export(rows, path, fmt: str = "csv") -> Path:
    """Write rows as CSV or JSON; I/O errors name the path."""
    if fmt not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write results: {exc.strerror}", str(path)) from exc
    return path


def _parse_cell(column, text, parameter):
    if column in _INT_COLUMNS:
        return int(text)
    if column in _FLOAT_COLUMNS:
        return None if text in ("", None) else float(text)
    if column == "value":
        return int(text) if parameter in ("D", "M") else float(text)
    return text


def read_rows(path) -> list[ResultRow]:
    """Inverse of :func:`export` for either format (chosen by file suffix or content)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        raw = [{k: ("" if v is None else str(v)) if k in _FLOAT_COLUMNS else v for k, v in d.items()}
               for d in json.loads(text)]
        raw = [{k: (str(v) if k == "value" else v) for k, v in d.items()} for d in raw]
    else:
        raw = list(csv.DictReader(io.StringIO(text, newline="")))
    rows = []
    for d in raw:
        rows.append(ResultRow(**{c: _parse_cell(c, d[c], d["parameter"]) for c in COLUMNS}))
    return rows
