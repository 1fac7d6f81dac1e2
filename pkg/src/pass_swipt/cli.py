"""Command-line entry point: ``pass-swipt solve | sweep | validate``.

Exit codes: 0 success, 1 invalid input (scenario, flags, report), 2 solver
failure (numerical breakdown, or a ``validate`` re-check that does not hold).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .config import load_default_scenario, parse_scenario, scenario_from_dict, serialize_scenario
from .driver import AlternationConfig, alternate, baseline_fixed, baseline_mimo
from .errors import ScenarioError, SolverError
from .experiments import SweepSpec, export, read_rows, replay, rows_to_csv, rows_to_json, run_sweep
from .position import ElementWiseConfig, PsoConfig
from .system import evaluate

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for solver failure here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _algorithms(choice):
    return ("elementwise", "pso") if choice == "both" else (choice,)


def _load(args):
    return parse_scenario(args.scenario) if args.scenario else load_default_scenario()


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise _UsageError(f"{out}: cannot write output: {exc.strerror}") from exc


def _solve_configs(args):
    for algo in _algorithms(args.algo):
        yield algo, AlternationConfig(
            position_algorithm=algo, seed=args.seed,
            elementwise=ElementWiseConfig(grid_points=args.grid_points),
            pso=PsoConfig(swarm_size=args.pso_swarm, max_iters=args.pso_iters, seed=args.seed),
        )


def cmd_solve(args):
    scenario = _load(args)
    reports = [alternate(scenario, cfg) for _, cfg in _solve_configs(args)]
    if args.baselines:
        reports += [baseline_mimo(scenario), baseline_fixed(scenario)]
    doc = {
        "scenario": serialize_scenario(scenario),
        "seed": args.seed,
        "backend": kernels.BACKEND,
        "reports": [r.to_dict() for r in reports],
    }
    if not args.timing:
        for r in doc["reports"]:
            r["wall_time_s"] = None
    if args.format == "json":
        _write(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        lines = ["algorithm,status,objective_w,outer_iterations"]
        for r in reports:
            obj = format(r.objective, ".17g") if r.feasible else ""
            lines.append(f"{r.algorithm},{r.status},{obj},{r.outer_iterations}")
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _sweep_values(args):
    if args.values:
        raw = [v for v in args.values.split(",") if v.strip()]
        try:
            return [float(v) for v in raw]
        except ValueError as exc:
            raise _UsageError(f"--values: {exc}") from exc
    return {"D": [256, 512, 1024, 2048, 4096],
            "P_B": [30, 32, 34, 36, 38, 40],
            "M": [2, 4, 6, 8]}[args.param]


def _spec(args):
    algos = _algorithms(args.algo)
    if args.baselines:
        algos = algos + ("mimo", "fixed")
    try:
        return SweepSpec(parameter=args.param, values=_sweep_values(args), trials=args.trials,
                         base_seed=args.seed, algorithms=algos, grid_points=args.grid_points,
                         pso_iters=args.pso_iters, pso_swarm=args.pso_swarm,
                         timing=getattr(args, "timing", False))
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def cmd_sweep(args):
    scenario = _load(args)
    rows = run_sweep(_spec(args), scenario)
    if args.out is None:
        sys.stdout.write(rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows))
    else:
        try:
            export(rows, args.out, args.format)
        except OSError as exc:
            raise _UsageError(f"{exc.filename}: {exc.strerror}") from exc
    return EXIT_OK


def _validate_report(doc):
    try:
        scenario = scenario_from_dict(doc["scenario"])
        reports = doc["reports"]
    except (KeyError, TypeError) as exc:
        raise _UsageError(f"report is missing field {exc}") from exc
    ok = True
    for r in reports:
        if r.get("status") == "infeasible":
            print(f"{r.get('algorithm')}: infeasible (nothing to check)")
            continue
        # baselines evaluate on their own antenna count
        sc = scenario.replace(num_antennas=1) if r.get("algorithm") == "fixed" else scenario
        try:
            layout = np.asarray(r["layout_m"], dtype=np.float64)
            alloc = np.asarray(r["allocation_w"], dtype=np.float64)
            claimed = float(r["objective_w"])
        except (KeyError, TypeError, ValueError) as exc:
            raise _UsageError(f"report entry is malformed: {exc}") from exc
        state = evaluate(sc, layout, alloc)
        match = state.objective == claimed
        good = state.feasible and match
        flags = ",".join(k for k, v in state.flags().items() if not v) or "all flags true"
        print(f"{r.get('algorithm')}: {'OK' if good else 'MISMATCH'} objective={state.objective!r} "
              f"claimed={claimed!r} ({flags})")
        ok &= good
    return ok


def _validate_rows(path, args):
    rows = read_rows(path)
    if not rows:
        raise _UsageError(f"{path}: no rows")
    params = {r.parameter for r in rows}
    if len(params) != 1:
        raise _UsageError(f"{path}: rows mix swept parameters")
    args.param = params.pop()
    spec = SweepSpec(parameter=args.param, values=sorted({r.value for r in rows}),
                     trials=max(r.trial for r in rows) + 1, base_seed=args.seed,
                     algorithms=tuple(dict.fromkeys(r.algorithm for r in rows)),
                     grid_points=args.grid_points, pso_iters=args.pso_iters,
                     pso_swarm=args.pso_swarm)
    scenario = _load(args)
    ok = True
    for row in rows:
        again = replay(row, spec, scenario)
        same = (again.status == row.status and again.seed == row.seed
                and (again.objective_w == row.objective_w
                     or (math.isnan(again.objective_w) and math.isnan(row.objective_w))))
        if not same:
            print(f"MISMATCH value={row.value} algorithm={row.algorithm} trial={row.trial}: "
                  f"file {row.objective_w!r}, replay {again.objective_w!r}")
        ok &= same
    print(f"{len(rows)} rows replayed: {'all match' if ok else 'mismatches found'}")
    return ok


def cmd_validate(args):
    if args.report is None:
        scenario = _load(args)
        print(f"scenario OK: M={scenario.num_antennas}, K_I={scenario.num_irs}, "
              f"K_E={scenario.num_ers}, P_B={scenario.power_budget!r} W")
        return EXIT_OK
    path = Path(args.report)
    try:
        text = path.read_text()
    except OSError as exc:
        raise _UsageError(f"{path}: {exc.strerror}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise _UsageError(f"{path}: invalid JSON: {exc}") from exc
        ok = _validate_report(doc)
    else:
        try:
            ok = _validate_rows(path, args)
        except (KeyError, ValueError) as exc:
            raise _UsageError(f"{path}: unreadable rows: {exc}") from exc
    return EXIT_OK if ok else EXIT_SOLVER


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--scenario", help="scenario YAML (default: bundled reference scenario)")
    common.add_argument("--algo", choices=("elementwise", "pso", "both"), default="both")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--grid-points", type=_positive_int, default=4096, help="element-wise grid size D")
    common.add_argument("--pso-iters", type=_positive_int, default=300)
    common.add_argument("--pso-swarm", type=_positive_int, default=10)
    common.add_argument("--no-baselines", dest="baselines", action="store_false",
                        help="skip the fixed-position baselines")
    common.add_argument("--timing", action="store_true",
                        help="record wall time (output is then not byte-reproducible)")

    parser = _Parser(prog="pass-swipt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="optimize one scenario")
    p.set_defaults(func=cmd_solve, default_format="json")
    p = sub.add_parser("sweep", parents=[common], help="parameter sweep over random receiver drops")
    p.add_argument("--param", choices=("D", "P_B", "M"), default="D",
                   help="swept parameter (P_B values in dBm)")
    p.add_argument("--values", help="comma-separated values (default: the reference axis)")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.set_defaults(func=cmd_sweep, default_format="csv")
    p = sub.add_parser("validate", parents=[common],
                       help="check a scenario file, a solve report, or replay sweep rows")
    p.add_argument("report", nargs="?", help="solve report (JSON) or sweep output (CSV/JSON)")
    p.set_defaults(func=cmd_validate, default_format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
