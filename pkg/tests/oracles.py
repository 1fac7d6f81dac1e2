"""Independent oracles shared by the unit and acceptance tests."""
import numpy as np


def grid_optimum(inst, steps=10_000):
    """Exact maximum over the grid {p = step * (i, j), i + j <= steps} of the power simplex.

    For each i the feasible j form an interval (all rows are linear); the
    objective grows with j, so the largest feasible j in that interval is the
    row optimum. Candidates are confirmed against every row directly.
    """
    step = inst.budget_rhs / inst.budget_row[0] / steps
    A = np.vstack([inst.sinr_rows, inst.energy_rows])
    b = np.concatenate([inst.sinr_rhs, inst.energy_rhs])
    i = np.arange(steps + 1)
    p1 = i * step
    lo = np.zeros(steps + 1)
    hi = (steps - i).astype(float)
    for (a1, a2), rhs in zip(A, b):
        # a1 p1 + a2 j step >= rhs
        slack = rhs - a1 * p1
        if a2 > 0:
            lo = np.maximum(lo, np.ceil(slack / (a2 * step)) - 1)
        elif a2 < 0:
            hi = np.minimum(hi, np.floor(slack / (a2 * step)) + 1)
        else:
            hi = np.where(slack <= 0, hi, -1)
    best = -np.inf
    for k in (0, 1, 2):
        j = hi - k
        valid = (j >= np.maximum(lo, 0)) & (j >= 0)
        if not valid.any():
            continue
        P = np.stack([p1[valid], j[valid] * step], axis=1)
        ok = (P @ A.T >= b).all(axis=1) & (P.sum(axis=1) * inst.budget_row[0] <= inst.budget_rhs)
        if ok.any():
            best = max(best, (P[ok] @ inst.objective).max())
    return best
