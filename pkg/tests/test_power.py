import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from pass_swipt.errors import SolverError
from pass_swipt.power import LpInstance, build_lp, optimize_powers, sic_split, solve_lp
from pass_swipt.system import decoding_order, evaluate, uniform_layout

from conftest import random_scenario
from oracles import grid_optimum


def _scipy(inst):
    A = np.vstack([-inst.sinr_rows, -inst.energy_rows, inst.budget_row[None, :]])
    b = np.concatenate([-inst.sinr_rhs, -inst.energy_rhs, [inst.budget_rhs]])
    s = np.abs(A).max(axis=1)
    res = linprog(-inst.objective / inst.objective.max(), A_ub=A / s[:, None], b_ub=b / s,
                  bounds=[(0, None)] * inst.num_vars, method="highs")
    return res


def _instances(n):
    rng = np.random.default_rng(42)
    for seed in range(n):
        sc = random_scenario(seed)
        yield sc, rng.uniform(0, 10, 4)


def test_matches_highs_on_random_instances():
    checked = 0
    for sc, layout in _instances(150):
        layout = np.sort(layout)
        inst = build_lp(sc, layout)
        ours = solve_lp(inst)
        ref = _scipy(inst)
        assert ours.optimal == (ref.status == 0)
        if ours.optimal:
            checked += 1
            assert ours.objective == pytest.approx(inst.objective @ ref.x, rel=1e-7)
    assert checked > 20


def test_grid_oracle_two_users():
    sc = random_scenario(3)
    layout = uniform_layout(sc)
    inst = build_lp(sc, layout)
    sol = solve_lp(inst)
    assert sol.optimal
    step = sc.power_budget / sc.num_antennas / 2000
    p = np.arange(0, 2001) * step
    P1, P2 = np.meshgrid(p, p, indexing="ij")
    X = np.stack([P1.ravel(), P2.ravel()], axis=1)
    ok = ((X @ inst.sinr_rows.T >= inst.sinr_rhs).all(axis=1)
          & (X @ inst.energy_rows.T >= inst.energy_rhs).all(axis=1)
          & (X @ inst.budget_row <= inst.budget_rhs))
    best = (X[ok] @ inst.objective).max()
    assert best <= sol.objective * (1 + 1e-12)
    assert sol.objective <= best * (1 + 1e-3)


def test_solution_is_feasible_and_budget_tight(scenario):
    sol = optimize_powers(scenario, uniform_layout(scenario))
    assert sol.optimal
    state = evaluate(scenario, uniform_layout(scenario), sol.allocation)
    assert state.feasible
    assert scenario.num_antennas * sol.allocation.sum() >= (1 - 1e-9) * scenario.power_budget
    assert "budget" in sol.binding


def test_objective_depends_only_on_total_power(scenario):
    # every point of the budget face is optimal; objective = (P_B / M) * sum of ER gains
    layout = uniform_layout(scenario)
    sol = optimize_powers(scenario, layout)
    inst = build_lp(scenario, layout)
    assert sol.objective == pytest.approx(scenario.power_budget / scenario.num_antennas
                                          * inst.objective[0], rel=1e-12)


def test_infeasible_when_floors_unreachable(scenario):
    sc = scenario.replace(energy_floor=1.0)
    assert solve_lp(build_lp(sc, uniform_layout(sc))).status == "infeasible"


def test_non_finite_rows_raise():
    inst = LpInstance((0,), np.array([1.0]), np.array([[np.nan]]), np.array([1.0]),
                      np.zeros((0, 1)), np.zeros(0), np.array([1.0]), 1.0)
    with pytest.raises(SolverError):
        solve_lp(inst)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(25.0, 45.0))
def test_optimum_dominates_any_feasible_split(seed, budget_dbm):
    sc = random_scenario(seed, power_budget=10 ** ((budget_dbm - 30) / 10))
    layout = uniform_layout(sc)
    sol = optimize_powers(sc, layout)
    split = sic_split(sc, decoding_order(sc, layout))
    state = evaluate(sc, layout, split)
    if state.feasible:
        assert sol.optimal and sol.objective >= state.objective * (1 - 1e-9)


def test_sic_split_ratios(scenario):
    order = (1, 0)
    p = sic_split(scenario, order, margin=0.0)
    assert scenario.num_antennas * p.sum() == pytest.approx(scenario.power_budget)
    assert p[1] == pytest.approx(scenario.sinr_floor * p[0])


@pytest.mark.parametrize("steps", [40, 300])
def test_interval_grid_oracle_matches_full_enumeration(steps):
    rng = np.random.default_rng(0)
    feasible = 0
    for seed in range(60):
        sc = random_scenario(seed)
        inst = build_lp(sc, np.sort(rng.uniform(0, 10, 4)))
        step = inst.budget_rhs / inst.budget_row[0] / steps
        i, j = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
        P = np.stack([i.ravel() * step, j.ravel() * step], axis=1)
        A = np.vstack([inst.sinr_rows, inst.energy_rows])
        b = np.concatenate([inst.sinr_rhs, inst.energy_rhs])
        ok = (P @ A.T >= b).all(axis=1) & ((i + j).ravel() <= steps)
        brute = (P[ok] @ inst.objective).max() if ok.any() else -np.inf
        feasible += ok.any()
        assert grid_optimum(inst, steps) == pytest.approx(brute, rel=1e-14)
    assert feasible > 10
