import math

import pytest

from pass_swipt.experiments import (SweepSpec, export, read_rows, replay, rows_to_csv, rows_to_json,
                                    run_one, run_sweep, solver_seed, trial_scenario)
from pass_swipt.system import reference_scenario

SMALL = dict(grid_points=256, pso_iters=30, pso_swarm=5)


def _same(a, b):
    for name in a.__dataclass_fields__:
        x, y = getattr(a, name), getattr(b, name)
        if isinstance(x, float) and math.isnan(x):
            assert math.isnan(y), name
        else:
            assert x == y, name


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("D", ())
    with pytest.raises(ValueError):
        SweepSpec("D", (256,), trials=0)
    with pytest.raises(ValueError):
        SweepSpec("Q", (1,))
    with pytest.raises(ValueError):
        SweepSpec("M", (2.5,))
    with pytest.raises(ValueError):
        SweepSpec("M", (2,), algorithms=("ga",))


def test_single_value_single_trial_row_count():
    spec = SweepSpec("D", (256,), trials=1, **{k: v for k, v in SMALL.items() if k != "grid_points"})
    rows = run_sweep(spec, reference_scenario())
    assert len(rows) == len(spec.algorithms) == 4
    assert [r.algorithm for r in rows] == list(spec.algorithms)


def test_receivers_shared_across_values_and_solver_seeds_distinct():
    spec = SweepSpec("P_B", (30.0, 40.0), trials=2)
    base = reference_scenario()
    a, b = trial_scenario(base, spec, 30.0, 1), trial_scenario(base, spec, 40.0, 1)
    assert a.irs == b.irs and a.ers == b.ers
    assert a.power_budget == pytest.approx(1.0) and b.power_budget == pytest.approx(10.0)
    assert trial_scenario(base, spec, 30.0, 0).irs != a.irs
    seeds = {solver_seed(0, v, t) for v in (30.0, 40.0) for t in range(2)}
    assert len(seeds) == 4


def test_antenna_sweep_applies_value():
    spec = SweepSpec("M", (6,), trials=1)
    assert trial_scenario(reference_scenario(), spec, 6, 0).num_antennas == 6


def test_infeasible_trials_recorded_not_raised():
    base = reference_scenario(energy_floor=1.0)
    spec = SweepSpec("D", (64,), trials=1, algorithms=("elementwise", "mimo"))
    rows = run_sweep(spec, base)
    assert [r.status for r in rows] == ["infeasible", "infeasible"]
    assert all(math.isnan(r.objective_w) for r in rows)


def test_sweep_is_deterministic_bytes():
    spec = SweepSpec("P_B", (34.0, 40.0), trials=2, base_seed=9, **SMALL)
    base = reference_scenario()
    assert rows_to_csv(run_sweep(spec, base)) == rows_to_csv(run_sweep(spec, base))


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_export_round_trip(tmp_path, fmt):
    spec = SweepSpec("P_B", (32.0, 40.0), trials=2, base_seed=1, timing=True, **SMALL)
    rows = run_sweep(spec, reference_scenario())
    path = export(rows, tmp_path / f"rows.{fmt}", fmt)
    back = read_rows(path)
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        _same(a, b)


def test_csv_format_details():
    spec = SweepSpec("D", (256,), trials=1, algorithms=("elementwise",), **SMALL)
    text = rows_to_csv(run_sweep(spec, reference_scenario()))
    assert "\r" not in text and text.endswith("\n")
    header, line = text.splitlines()
    assert header.split(",")[:3] == ["parameter", "value", "algorithm"]
    obj = line.split(",")[6]
    assert len(obj.replace("-", "").replace(".", "").split("e")[0]) <= 17
    assert rows_to_json([]) == "[]\n"


def test_rows_replay_exactly():
    spec = SweepSpec("M", (2, 4), trials=2, base_seed=3, **SMALL)
    base = reference_scenario()
    for row in run_sweep(spec, base):
        _same(replay(row, spec, base), row)


def test_export_io_error_names_path(tmp_path):
    with pytest.raises(OSError) as info:
        export([], tmp_path / "no" / "such" / "dir.csv")
    assert "dir.csv" in str(info.value)


def test_run_one_matches_sweep_cell():
    spec = SweepSpec("D", (256, 512), trials=2, algorithms=("pso",), **SMALL)
    base = reference_scenario()
    rows = run_sweep(spec, base)
    _same(run_one(base, spec, 512, "pso", 1), rows[-1])
