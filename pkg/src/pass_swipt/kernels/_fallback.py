"""Pure numpy implementations of the hot kernels.

Semantics here are the reference for the compiled ``_core`` extension; the
two must agree to floating-point rounding.

Receiver arrays passed to the kernels are ``(K, 3)`` with energy receivers
first and information receivers after them *in SIC decoding order*. Power
and noise vectors are in the same decoding order.
"""
import numpy as np

from ..errors import DegenerateGeometryError

NAME = "python"

MIN_DISTANCE = 1e-6
REL_SLACK = 1e-9
# rows already within this of the spacing are left alone (matches layout checks)
GAP_SLACK = 1e-12
TWO_PI = 2.0 * np.pi


def aggregate_gains(layouts, rx, height, feed_x, wavelength, guided_wavelength, eta):
    """Complex aggregate channel for every layout row and receiver.

    ``layouts`` is ``(N, M)``; the result is ``(N, K)`` complex.
    """
    xs = np.ascontiguousarray(layouts, dtype=np.float64)
    rx = np.ascontiguousarray(rx, dtype=np.float64)
    dx = xs[:, :, None] - rx[:, 0]
    lateral = rx[:, 1] ** 2 + (height - rx[:, 2]) ** 2
    r = np.sqrt(dx * dx + lateral)
    if r.size and r.min() < MIN_DISTANCE:
        raise DegenerateGeometryError("receiver coincides with an antenna")
    guide = np.abs(feed_x - xs)
    turns = np.fmod(r, wavelength) / wavelength
    turns += (np.fmod(guide, guided_wavelength) / guided_wavelength)[:, :, None]
    phase = TWO_PI * turns
    h = (eta / r) * (np.cos(phase) - 1j * np.sin(phase))
    return h.sum(axis=1)


def score_gains(gains, n_er, power, noise, sinr_floor, energy_floor):
    """Objective and total relative constraint violation per row.

    Violation is zero exactly when every SINR floor, energy floor and the
    frozen SIC ordering hold (up to ``REL_SLACK``).
    """
    g = gains.real ** 2 + gains.imag ** 2
    g_er = g[:, :n_er]
    g_ir = g[:, n_er:]
    power = np.asarray(power, dtype=np.float64)
    total = power.sum()
    harvested = total * g_er
    objective = harvested.sum(axis=1)

    later = np.zeros_like(power)
    if power.size > 1:
        later[:-1] = np.cumsum(power[::-1])[::-1][1:]
    sinr = power * g_ir / (g_ir * later + noise)
    ratio = sinr / sinr_floor
    violation = np.where(ratio < 1.0 - REL_SLACK, 1.0 - ratio, 0.0).sum(axis=1)
    if energy_floor > 0:
        ratio = harvested / energy_floor
        violation += np.where(ratio < 1.0 - REL_SLACK, 1.0 - ratio, 0.0).sum(axis=1)
    if g_ir.shape[1] > 1:
        a = g_ir[:, :-1]
        b = g_ir[:, 1:]
        violation += np.where(a > b * (1.0 + REL_SLACK), (a - b) / a, 0.0).sum(axis=1)
    return objective, violation


def better(obj_a, viol_a, obj_b, viol_b):
    """Elementwise strict "a beats b": feasible first, then objective, then violation."""
    fa = viol_a == 0
    fb = viol_b == 0
    return np.where(fa & fb, obj_a > obj_b, np.where(fa | fb, fa, viol_a < viol_b))


def best_index(objective, violation):
    feasible = violation == 0
    if feasible.any():
        return int(np.argmax(np.where(feasible, objective, -np.inf)))
    return int(np.argmin(violation))


def _isotonic(target):
    # pool-adjacent-violators, unit weights; returns fitted values and block sizes
    values, sizes = [], []
    for t in target:
        values.append(float(t))
        sizes.append(1)
        while len(values) > 1 and values[-2] > values[-1]:
            v, s = values.pop(), sizes.pop()
            values[-1] = (values[-1] * sizes[-1] + v * s) / (sizes[-1] + s)
            sizes[-1] += s
    fitted = np.repeat(values, sizes)
    pooled = np.repeat(np.asarray(sizes) > 1, sizes)
    return fitted, pooled


def repair_spacing(layouts, velocity, min_spacing, upper):
    """Project each row onto ``{x in [0, upper]^M : |x_i - x_j| >= min_spacing}``.

    The projection is the least-squares one: sorted positions are shifted by
    ``k * min_spacing`` and fitted by isotonic regression, so crowded groups
    spread symmetrically about their centre. Untouched components keep their
    exact value; moved components get zero velocity.
    """
    n, m = layouts.shape
    steps = min_spacing * np.arange(m)
    top = upper - min_spacing * (m - 1)
    for row in range(n):
        x = layouts[row]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if m > 1 and np.all(np.diff(xs) >= min_spacing - GAP_SLACK) and xs[0] >= 0 and xs[-1] <= upper:
            continue
        fitted, pooled = _isotonic(xs - steps)
        clipped = np.clip(fitted, 0.0, top)
        moved = pooled | (clipped != fitted)
        new = np.where(moved, clipped + steps, xs)
        x[order] = new
        if velocity is not None:
            velocity[row, order[moved]] = 0.0


def _clear_of_others(trial, m, min_spacing):
    others = np.delete(trial, m, axis=1)
    if others.shape[1] == 0:
        return np.ones(trial.shape[0], dtype=bool)
    return np.abs(others - trial[:, m:m + 1]).min(axis=1) >= min_spacing


def pso_loop(positions, velocity, draws, rx, n_er, height, feed_x, wavelength,
             guided_wavelength, eta, power, noise, sinr_floor, energy_floor,
             w_max, w_min, c1_0, c2_0, v_max, upper, min_spacing, element_best=False):
    """Run LDW-PSO iterations on a prepared swarm.

    ``draws`` holds every random number the loop consumes, one row per
    iteration laid out as ``[c1, c2, (r1, r2) per particle per dimension]``.
    ``positions`` and ``velocity`` are updated in place.

    Best positions are first updated whole-vector (a particle replaces its
    personal best if it is better; the best personal best replaces the global
    best if better). With ``element_best`` they are then also updated one
    coordinate at a time: coordinate ``m`` of a personal best takes the
    particle's current ``x_m`` if that alone improves it, and coordinate ``m``
    of the global best takes the best ``p_m`` across the swarm if that
    improves it. Swapped-in coordinates must respect the minimum spacing.

    Returns ``(best_layout, best_objective, best_violation, history)`` with
    ``history[t] = (objective, violation)`` of the global best after
    iteration ``t``.
    """
    n_particles, m = positions.shape
    t_max = draws.shape[0]

    def score(x):
        gains = aggregate_gains(x, rx, height, feed_x, wavelength, guided_wavelength, eta)
        return score_gains(gains, n_er, power, noise, sinr_floor, energy_floor)

    obj, viol = score(positions)
    pbest = positions.copy()
    pbest_obj, pbest_viol = obj.copy(), viol.copy()
    g = best_index(pbest_obj, pbest_viol)
    gbest = pbest[g].copy()
    gbest_obj, gbest_viol = pbest_obj[g], pbest_viol[g]

    history = np.empty((t_max + 1, 2))
    history[0] = gbest_obj, gbest_viol
    for t in range(1, t_max + 1):
        row = draws[t - 1]
        w = w_max - (w_max - w_min) * t / t_max
        c1 = c1_0 * row[0]
        c2 = c2_0 * row[1]
        r = row[2:].reshape(n_particles, m, 2)
        velocity *= w
        velocity += c1 * r[:, :, 0] * (pbest - positions)
        velocity += c2 * r[:, :, 1] * (gbest - positions)
        np.clip(velocity, -v_max, v_max, out=velocity)
        positions += velocity
        hit = (positions < 0.0) | (positions > upper)
        np.clip(positions, 0.0, upper, out=positions)
        velocity[hit] = 0.0
        repair_spacing(positions, velocity, min_spacing, upper)

        obj, viol = score(positions)
        improved = better(obj, viol, pbest_obj, pbest_viol)
        pbest[improved] = positions[improved]
        pbest_obj[improved] = obj[improved]
        pbest_viol[improved] = viol[improved]
        if element_best:
            for j in range(m):
                trial = pbest.copy()
                trial[:, j] = positions[:, j]
                o, v = score(trial)
                ok = _clear_of_others(trial, j, min_spacing) & better(o, v, pbest_obj, pbest_viol)
                pbest[ok] = trial[ok]
                pbest_obj[ok] = o[ok]
                pbest_viol[ok] = v[ok]

        g = best_index(pbest_obj, pbest_viol)
        if better(pbest_obj[g], pbest_viol[g], gbest_obj, gbest_viol):
            gbest = pbest[g].copy()
            gbest_obj, gbest_viol = pbest_obj[g], pbest_viol[g]
        if element_best:
            for j in range(m):
                trial = np.repeat(gbest[None, :], n_particles, axis=0)
                trial[:, j] = pbest[:, j]
                o, v = score(trial)
                v = np.where(_clear_of_others(trial, j, min_spacing), v, np.inf)
                k = best_index(o, v)
                if better(o[k], v[k], gbest_obj, gbest_viol):
                    gbest = trial[k].copy()
                    gbest_obj, gbest_viol = o[k], v[k]
        history[t] = gbest_obj, gbest_viol
    return gbest, float(gbest_obj), float(gbest_viol), history
