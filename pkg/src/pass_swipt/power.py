"""Power allocation for a fixed antenna layout.

With the layout fixed, every constraint is affine in the per-antenna power
vector once the SINR floor is multiplied through by its denominator::

    p_i g_i - sinr_floor * g_i * sum_{l decoded after i} p_l >= sinr_floor * noise_i
    (sum_i p_i) * G_j >= energy_floor                      for every ER j
    M * sum_i p_i <= power_budget

and the objective ``sum_i p_i * sum_j G_j`` is linear, so the subproblem is
an exact LP. It is solved with a small dense two-phase simplex using Bland's
rule; the final basis is re-solved from the original rows to certify the
answer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .system import Scenario, decoding_order, er_gains, evaluate, ir_gains

_PIVOT_TOL = 1e-12
_OPT_TOL = 1e-10
_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LpInstance:
    """Rows are stored in their natural sense: ``sinr_rows @ p >= sinr_rhs`` etc.

    Variables are indexed by IR; SINR rows follow the decoding order.
    """

    order: tuple[int, ...]
    objective: np.ndarray
    sinr_rows: np.ndarray
    sinr_rhs: np.ndarray
    energy_rows: np.ndarray
    energy_rhs: np.ndarray
    budget_row: np.ndarray
    budget_rhs: float

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def row_labels(self) -> list[str]:
        return ([f"sinr[{i}]" for i in self.order]
                + [f"energy[{j}]" for j in range(len(self.energy_rhs))] + ["budget"])


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible"
    allocation: np.ndarray | None
    objective: float
    binding: tuple[str, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def build_lp(scenario: Scenario, layout) -> LpInstance:
    layout = np.asarray(layout, dtype=np.float64)
    g_ir = ir_gains(scenario, layout)
    g_er = er_gains(scenario, layout)
    order = decoding_order(scenario, layout, g_ir)
    k_i = scenario.num_irs
    gamma = scenario.sinr_floor

    sinr_rows = np.zeros((k_i, k_i))
    sinr_rhs = np.empty(k_i)
    for pos, i in enumerate(order):
        sinr_rows[pos, i] = g_ir[i]
        for l in order[pos + 1:]:
            sinr_rows[pos, l] = -gamma * g_ir[i]
        sinr_rhs[pos] = gamma * scenario.noise_power[i]

    energy_rows = np.repeat(g_er[:, None], k_i, axis=1)
    energy_rhs = np.full(len(g_er), scenario.energy_floor)
    return LpInstance(
        order=order,
        objective=np.full(k_i, g_er.sum()),
        sinr_rows=sinr_rows,
        sinr_rhs=sinr_rhs,
        energy_rows=energy_rows,
        energy_rhs=energy_rhs,
        budget_row=np.full(k_i, float(scenario.num_antennas)),
        budget_rhs=float(scenario.power_budget),
    )


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _run_simplex(T, basis, cost, allowed, max_pivots):
    """Maximise ``cost @ x`` over the tableau ``T`` (last column = rhs).

    Bland's rule: lowest-index improving column enters; ratio ties leave by
    lowest basic variable index.
    """
    m = T.shape[0]
    for _ in range(max_pivots):
        cb = cost[basis]
        reduced = cost - cb @ T[:, :-1]
        enter = -1
        for j in np.flatnonzero(allowed):
            if reduced[j] > _OPT_TOL:
                enter = j
                break
        if enter < 0:
            return
        col = T[:, enter]
        best_row, best_ratio = -1, np.inf
        for r in range(m):
            if col[r] > _PIVOT_TOL:
                ratio = T[r, -1] / col[r]
                if (ratio < best_ratio - 1e-15
                        or (abs(ratio - best_ratio) <= 1e-15 and basis[r] < basis[best_row])):
                    best_row, best_ratio = r, ratio
        if best_row < 0:
            raise SolverError("LP unbounded; the budget row should prevent this")
        _pivot(T, basis, best_row, enter)
    raise SolverError("simplex pivot limit reached")


def _simplex(c, A, b, senses):
    """Two-phase simplex for ``max c@x  s.t.  A x (senses) b,  x >= 0``.

    Returns ``(x, basis_columns, full_matrix, full_rhs)`` or ``None`` if
    infeasible. ``senses`` entries are ``"<="`` or ``">="``.
    """
    A = np.array(A, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    senses = list(senses)
    m, n = A.shape
    for r in range(m):
        if b[r] < 0:
            A[r], b[r] = -A[r], -b[r]
            senses[r] = ">=" if senses[r] == "<=" else "<="

    n_slack = m
    art_rows = [r for r in range(m) if senses[r] == ">="]
    n_art = len(art_rows)
    width = n + n_slack + n_art
    T = np.zeros((m, width + 1))
    T[:, :n] = A
    T[:, -1] = b
    basis = np.empty(m, dtype=int)
    for r in range(m):
        T[r, n + r] = 1.0 if senses[r] == "<=" else -1.0
        basis[r] = n + r
    for a, r in enumerate(art_rows):
        T[r, n + n_slack + a] = 1.0
        basis[r] = n + n_slack + a
    full = T[:, :n + n_slack].copy()
    rhs = b.copy()

    max_pivots = 50 * (width + m) + 100
    if n_art:
        cost1 = np.zeros(width)
        cost1[n + n_slack:] = -1.0
        _run_simplex(T, basis, cost1, np.ones(width, dtype=bool), max_pivots)
        if T[basis >= n + n_slack, -1].sum() > _FEAS_TOL:
            return None
        # drive zero-level artificials out of the basis
        for r in range(m):
            if basis[r] >= n + n_slack:
                cols = np.flatnonzero(np.abs(T[r, :n + n_slack]) > _PIVOT_TOL)
                if cols.size:
                    _pivot(T, basis, r, cols[0])
        keep = basis < n + n_slack
        T, basis = T[keep], basis[keep]
        full, rhs = full[keep], rhs[keep]
        T = np.delete(T, np.s_[n + n_slack:width], axis=1)

    cost2 = np.zeros(n + n_slack)
    cost2[:n] = c
    _run_simplex(T, basis, cost2, np.ones(n + n_slack, dtype=bool), max_pivots)
    return basis, full, rhs, cost2


def _certify(basis, full, rhs, cost):
    """Re-solve the final basis from the original rows and check optimality."""
    B = full[:, basis]
    try:
        xb = np.linalg.solve(B, rhs)
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular final basis: {exc}") from exc
    if not np.all(np.isfinite(xb)) or np.any(xb < -_FEAS_TOL * max(1.0, np.abs(rhs).max())):
        raise SolverError("final basis is not primal feasible")
    reduced = cost - y @ full
    if np.any(reduced > 1e-8 * max(1.0, np.abs(cost).max())):
        raise SolverError("final basis fails the optimality check")
    x = np.zeros(full.shape[1])
    x[basis] = np.maximum(xb, 0.0)
    return x


def solve_lp(instance: LpInstance) -> LpSolution:
    """Solve the power-allocation LP exactly.

    Returns an ``infeasible`` verdict when the floors cannot be met inside the
    budget; raises :class:`~pass_swipt.errors.SolverError` on numerical failure.
    """
    A = np.vstack([instance.sinr_rows, instance.energy_rows, instance.budget_row[None, :]])
    b = np.concatenate([instance.sinr_rhs, instance.energy_rhs, [instance.budget_rhs]])
    senses = [">="] * (len(b) - 1) + ["<="]
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise SolverError("non-finite LP coefficients")

    # row and objective scaling; gains ~1e-8 against powers ~1 W
    scale = np.abs(A).max(axis=1)
    scale[scale == 0] = 1.0
    A_s, b_s = A / scale[:, None], b / scale
    c_scale = np.abs(instance.objective).max() or 1.0
    c_s = instance.objective / c_scale

    n = instance.num_vars
    result = _simplex(c_s, A_s, b_s, senses)
    if result is None:
        return LpSolution("infeasible", None, float("nan"))
    basis, full, rhs, cost = result
    x = _certify(basis, full, rhs, cost)
    p = x[:n]
    activity = A @ p
    slack = np.where(np.array(senses) == ">=", activity - b, b - activity)
    tol = _FEAS_TOL * np.maximum(np.abs(b), np.abs(A) @ np.abs(p))
    if np.any(slack < -np.maximum(tol, 1e-300) * 10):
        raise SolverError("solution violates LP rows beyond tolerance")
    labels = instance.row_labels()
    binding = tuple(lbl for lbl, s, t in zip(labels, slack, tol) if s <= max(t, 1e-300))
    return LpSolution("optimal", p, float(instance.objective @ p), binding)


def optimize_powers(scenario: Scenario, layout) -> LpSolution:
    """Optimal allocation for ``layout``; the objective is re-derived by :func:`evaluate`."""
    sol = solve_lp(build_lp(scenario, layout))
    if not sol.optimal:
        return sol
    state = evaluate(scenario, layout, sol.allocation)
    return LpSolution(sol.status, sol.allocation, state.objective, sol.binding)


def sic_split(scenario: Scenario, order, margin: float = 1e-3) -> np.ndarray:
    """Spend the whole budget with each IR holding ``sinr_floor*(1+margin)`` times
    the power of everyone decoded after it.

    Ignores noise, so it satisfies the SIC power ratios but is not guaranteed
    feasible; it serves as a starting allocation when the LP at the initial
    layout is infeasible.
    """
    k = len(order)
    gamma = scenario.sinr_floor * (1 + margin)
    shares = np.empty(k)
    later = 0.0
    for pos in range(k - 1, -1, -1):
        shares[pos] = 1.0 if pos == k - 1 else gamma * later
        later += shares[pos]
    per_antenna = scenario.power_budget / scenario.num_antennas
    alloc = np.empty(k)
    alloc[list(order)] = shares / shares.sum() * per_antenna
    return alloc
