# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Mirrors ``_fallback`` operation for operation."""
import numpy as np

from libc.math cimport sqrt, fmod, fabs, cos, sin, M_PI, INFINITY
from libc.stdlib cimport malloc, free

from ..errors import DegenerateGeometryError

NAME = "cython"

MIN_DISTANCE = 1e-6
REL_SLACK = 1e-9

cdef double _MIN_DISTANCE = 1e-6
cdef double _REL_SLACK = 1e-9
cdef double _GAP_SLACK = 1e-12
cdef double _TWO_PI = 2.0 * M_PI


cdef int _gains(const double[:, ::1] xs, const double[:, ::1] rx, double height,
                double feed_x, double lam, double lam_g, double eta,
                double[:, ::1] re, double[:, ::1] im) noexcept nogil:
    cdef Py_ssize_t n, m, k
    cdef Py_ssize_t nk = rx.shape[0]
    cdef double dx, r, lateral, gturn, phase, amp, dz
    for n in range(xs.shape[0]):
        for k in range(nk):
            re[n, k] = 0.0
            im[n, k] = 0.0
        for m in range(xs.shape[1]):
            gturn = fmod(fabs(feed_x - xs[n, m]), lam_g) / lam_g
            for k in range(nk):
                dx = xs[n, m] - rx[k, 0]
                dz = height - rx[k, 2]
                lateral = rx[k, 1] * rx[k, 1] + dz * dz
                r = sqrt(dx * dx + lateral)
                if r < _MIN_DISTANCE:
                    return 1
                phase = _TWO_PI * (fmod(r, lam) / lam + gturn)
                amp = eta / r
                re[n, k] = re[n, k] + amp * cos(phase)
                im[n, k] = im[n, k] + amp * (-sin(phase))
    return 0


cdef void _score(const double[:, ::1] re, const double[:, ::1] im, Py_ssize_t n_er,
                 const double[::1] power, const double[::1] later, const double[::1] noise,
                 double total, double sinr_floor, double energy_floor,
                 double[::1] objective, double[::1] violation) noexcept nogil:
    cdef Py_ssize_t n, k, i
    cdef Py_ssize_t nk = re.shape[1]
    cdef Py_ssize_t n_ir = nk - n_er
    cdef double g, obj, v_sinr, v_energy, v_order, ratio, a, b, harvested
    for n in range(re.shape[0]):
        obj = 0.0
        v_energy = 0.0
        for k in range(n_er):
            g = re[n, k] * re[n, k] + im[n, k] * im[n, k]
            harvested = total * g
            obj = obj + harvested
            if energy_floor > 0:
                ratio = harvested / energy_floor
                if ratio < 1.0 - _REL_SLACK:
                    v_energy = v_energy + (1.0 - ratio)
        v_sinr = 0.0
        v_order = 0.0
        b = 0.0
        for i in range(n_ir):
            k = n_er + i
            g = re[n, k] * re[n, k] + im[n, k] * im[n, k]
            ratio = (power[i] * g / (g * later[i] + noise[i])) / sinr_floor
            if ratio < 1.0 - _REL_SLACK:
                v_sinr = v_sinr + (1.0 - ratio)
            if i > 0:
                a = b
                if a > g * (1.0 + _REL_SLACK):
                    v_order = v_order + (a - g) / a
            b = g
        objective[n] = obj
        if energy_floor > 0:
            violation[n] = (v_sinr + v_energy) + v_order
        else:
            violation[n] = v_sinr + v_order


cdef inline bint _better(double oa, double va, double ob, double vb) noexcept nogil:
    if va == 0 and vb == 0:
        return oa > ob
    if va == 0 or vb == 0:
        return va == 0
    return va < vb


cdef Py_ssize_t _best_index(const double[::1] obj, const double[::1] viol) noexcept nogil:
    cdef Py_ssize_t i, best = -1
    for i in range(obj.shape[0]):
        if viol[i] == 0 and (best < 0 or obj[i] > obj[best]):
            best = i
    if best >= 0:
        return best
    best = 0
    for i in range(1, obj.shape[0]):
        if viol[i] < viol[best]:
            best = i
    return best


cdef void _repair_row(double[::1] x, double* v, double spacing, double upper,
                      Py_ssize_t* order, double* xs, double* val, Py_ssize_t* size,
                      double* fitted, bint* pooled) noexcept nogil:
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t i, j, key, nb, s
    cdef double top = upper - spacing * (m - 1)
    cdef double c, step
    cdef bint ok, moved

    # stable insertion argsort
    for i in range(m):
        order[i] = i
    for i in range(1, m):
        key = order[i]
        j = i - 1
        while j >= 0 and x[order[j]] > x[key]:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key
    for i in range(m):
        xs[i] = x[order[i]]

    ok = xs[0] >= 0 and xs[m - 1] <= upper
    if ok and m > 1:
        for i in range(1, m):
            if not (xs[i] - xs[i - 1] >= spacing - _GAP_SLACK):
                ok = False
                break
    if ok and m > 1:
        return

    nb = 0
    for i in range(m):
        val[nb] = xs[i] - spacing * i
        size[nb] = 1
        nb += 1
        while nb > 1 and val[nb - 2] > val[nb - 1]:
            val[nb - 2] = (val[nb - 2] * size[nb - 2] + val[nb - 1] * size[nb - 1]) / (size[nb - 2] + size[nb - 1])
            size[nb - 2] += size[nb - 1]
            nb -= 1
    i = 0
    for j in range(nb):
        for s in range(size[j]):
            fitted[i] = val[j]
            pooled[i] = size[j] > 1
            i += 1
    for i in range(m):
        c = fitted[i]
        if c < 0.0:
            c = 0.0
        elif c > top:
            c = top
        moved = pooled[i] or c != fitted[i]
        if moved:
            step = spacing * i
            x[order[i]] = c + step
            if v != NULL:
                v[order[i]] = 0.0


def aggregate_gains(layouts, rx, double height, double feed_x, double wavelength,
                    double guided_wavelength, double eta):
    cdef const double[:, ::1] xs = np.ascontiguousarray(layouts, dtype=np.float64)
    cdef const double[:, ::1] r = np.ascontiguousarray(rx, dtype=np.float64)
    re_a = np.empty((xs.shape[0], r.shape[0]))
    im_a = np.empty((xs.shape[0], r.shape[0]))
    cdef double[:, ::1] re = re_a, im = im_a
    cdef int bad
    with nogil:
        bad = _gains(xs, r, height, feed_x, wavelength, guided_wavelength, eta, re, im)
    if bad:
        raise DegenerateGeometryError("receiver coincides with an antenna")
    out = np.empty(re_a.shape, dtype=np.complex128)
    out.real = re_a
    out.imag = im_a
    return out


def _later(power):
    later = np.zeros_like(power)
    for i in range(power.shape[0] - 2, -1, -1):
        later[i] = later[i + 1] + power[i + 1]
    return later


def score_gains(gains, Py_ssize_t n_er, power, noise, double sinr_floor, double energy_floor):
    gains = np.asarray(gains)
    p = np.ascontiguousarray(power, dtype=np.float64)
    nz = np.ascontiguousarray(noise, dtype=np.float64)
    later = _later(p)
    objective = np.empty(gains.shape[0])
    violation = np.empty(gains.shape[0])
    cdef const double[:, ::1] re = np.ascontiguousarray(gains.real, dtype=np.float64)
    cdef const double[:, ::1] im = np.ascontiguousarray(gains.imag, dtype=np.float64)
    cdef const double[::1] pv = p, nv = nz, lv = later
    cdef double[::1] ov = objective, vv = violation
    _score(re, im, n_er, pv, lv, nv, _sum(pv), sinr_floor, energy_floor, ov, vv)
    return objective, violation


cdef double _sum(const double[::1] a) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        s = s + a[i]
    return s


def better(obj_a, viol_a, obj_b, viol_b):
    oa, va, ob, vb = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64)
                                           for a in (obj_a, viol_a, obj_b, viol_b)))
    out = np.empty(oa.shape, dtype=bool)
    flat = out.reshape(-1)
    for i, (a, b, c, d) in enumerate(zip(oa.flat, va.flat, ob.flat, vb.flat)):
        flat[i] = _better(a, b, c, d)
    return out


def best_index(objective, violation):
    return int(_best_index(np.ascontiguousarray(objective, dtype=np.float64),
                           np.ascontiguousarray(violation, dtype=np.float64)))


cdef class _Scratch:
    cdef Py_ssize_t* order
    cdef Py_ssize_t* size
    cdef double* xs
    cdef double* val
    cdef double* fitted
    cdef bint* pooled

    def __cinit__(self, Py_ssize_t m):
        self.order = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
        self.size = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
        self.xs = <double*> malloc(m * sizeof(double))
        self.val = <double*> malloc(m * sizeof(double))
        self.fitted = <double*> malloc(m * sizeof(double))
        self.pooled = <bint*> malloc(m * sizeof(bint))
        if (self.order == NULL or self.size == NULL or self.xs == NULL or self.val == NULL
                or self.fitted == NULL or self.pooled == NULL):
            raise MemoryError()

    def __dealloc__(self):
        free(self.order)
        free(self.size)
        free(self.xs)
        free(self.val)
        free(self.fitted)
        free(self.pooled)


cdef void _repair_all(double[:, ::1] x, double[:, ::1] v, bint has_v, double spacing,
                      double upper, _Scratch s) noexcept nogil:
    cdef Py_ssize_t n
    for n in range(x.shape[0]):
        _repair_row(x[n], &v[n, 0] if has_v else NULL, spacing, upper,
                    s.order, s.xs, s.val, s.size, s.fitted, s.pooled)


def repair_spacing(layouts, velocity, double min_spacing, double upper):
    cdef double[:, ::1] x = layouts
    cdef double[:, ::1] v
    cdef bint has_v = velocity is not None
    v = velocity if has_v else np.empty((1, x.shape[1]))
    cdef _Scratch s = _Scratch(x.shape[1])
    _repair_all(x, v, has_v, min_spacing, upper, s)


cdef inline bint _clear(const double[:, ::1] x, Py_ssize_t i, Py_ssize_t j,
                        double spacing) noexcept nogil:
    # coordinate j of row i keeps the minimum spacing to the rest of the row
    cdef Py_ssize_t k
    cdef double gap = INFINITY
    for k in range(x.shape[1]):
        if k != j and fabs(x[i, k] - x[i, j]) < gap:
            gap = fabs(x[i, k] - x[i, j])
    return gap >= spacing


def pso_loop(positions, velocity, draws, rx, Py_ssize_t n_er, double height, double feed_x,
             double wavelength, double guided_wavelength, double eta, power, noise,
             double sinr_floor, double energy_floor, double w_max, double w_min,
             double c1_0, double c2_0, double v_max, double upper, double min_spacing,
             bint element_best=False):
    cdef double[:, ::1] x = positions
    cdef double[:, ::1] v = velocity
    cdef const double[:, ::1] d = np.ascontiguousarray(draws, dtype=np.float64)
    cdef const double[:, ::1] r = np.ascontiguousarray(rx, dtype=np.float64)
    cdef const double[::1] p = np.ascontiguousarray(power, dtype=np.float64)
    cdef const double[::1] nz = np.ascontiguousarray(noise, dtype=np.float64)
    cdef const double[::1] later = _later(np.asarray(p))
    cdef double total = _sum(p)
    cdef Py_ssize_t n_p = x.shape[0], m = x.shape[1], nk = r.shape[0]
    cdef Py_ssize_t t_max = d.shape[0]
    cdef Py_ssize_t t, i, j, jj, g
    cdef double w, c1, c2, vel
    cdef bint clear
    cdef int bad = 0

    re_a = np.empty((n_p, nk))
    im_a = np.empty((n_p, nk))
    obj_a = np.empty(n_p)
    viol_a = np.empty(n_p)
    pbest_a = np.array(positions, dtype=np.float64, copy=True)
    pobj_a = np.empty(n_p)
    pviol_a = np.empty(n_p)
    gbest_a = np.empty(m)
    hist_a = np.empty((t_max + 1, 2))
    trial_a = np.empty((n_p, m))
    cdef double[:, ::1] re = re_a, im = im_a, pbest = pbest_a, hist = hist_a, trial = trial_a
    cdef double[::1] obj = obj_a, viol = viol_a, pobj = pobj_a, pviol = pviol_a, gbest = gbest_a
    cdef double gobj, gviol
    cdef _Scratch s = _Scratch(m)

    with nogil:
        bad = _gains(x, r, height, feed_x, wavelength, guided_wavelength, eta, re, im)
        if not bad:
            _score(re, im, n_er, p, later, nz, total, sinr_floor, energy_floor, obj, viol)
            for i in range(n_p):
                pobj[i] = obj[i]
                pviol[i] = viol[i]
            g = _best_index(pobj, pviol)
            for j in range(m):
                gbest[j] = pbest[g, j]
            gobj = pobj[g]
            gviol = pviol[g]
            hist[0, 0] = gobj
            hist[0, 1] = gviol

            for t in range(1, t_max + 1):
                w = w_max - (w_max - w_min) * t / t_max
                c1 = c1_0 * d[t - 1, 0]
                c2 = c2_0 * d[t - 1, 1]
                for i in range(n_p):
                    for j in range(m):
                        vel = v[i, j] * w
                        vel = vel + c1 * d[t - 1, 2 + 2 * (i * m + j)] * (pbest[i, j] - x[i, j])
                        vel = vel + c2 * d[t - 1, 3 + 2 * (i * m + j)] * (gbest[j] - x[i, j])
                        if vel < -v_max:
                            vel = -v_max
                        elif vel > v_max:
                            vel = v_max
                        x[i, j] = x[i, j] + vel
                        if x[i, j] < 0.0:
                            x[i, j] = 0.0
                            vel = 0.0
                        elif x[i, j] > upper:
                            x[i, j] = upper
                            vel = 0.0
                        v[i, j] = vel
                _repair_all(x, v, True, min_spacing, upper, s)

                bad = _gains(x, r, height, feed_x, wavelength, guided_wavelength, eta, re, im)
                if bad:
                    break
                _score(re, im, n_er, p, later, nz, total, sinr_floor, energy_floor, obj, viol)
                for i in range(n_p):
                    if _better(obj[i], viol[i], pobj[i], pviol[i]):
                        for j in range(m):
                            pbest[i, j] = x[i, j]
                        pobj[i] = obj[i]
                        pviol[i] = viol[i]
                if element_best:
                    for j in range(m):
                        for i in range(n_p):
                            for jj in range(m):
                                trial[i, jj] = pbest[i, jj]
                            trial[i, j] = x[i, j]
                        bad = _gains(trial, r, height, feed_x, wavelength, guided_wavelength,
                                     eta, re, im)
                        if bad:
                            break
                        _score(re, im, n_er, p, later, nz, total, sinr_floor, energy_floor,
                               obj, viol)
                        for i in range(n_p):
                            if _clear(trial, i, j, min_spacing) and _better(obj[i], viol[i],
                                                                            pobj[i], pviol[i]):
                                for jj in range(m):
                                    pbest[i, jj] = trial[i, jj]
                                pobj[i] = obj[i]
                                pviol[i] = viol[i]
                    if bad:
                        break

                g = _best_index(pobj, pviol)
                if _better(pobj[g], pviol[g], gobj, gviol):
                    for j in range(m):
                        gbest[j] = pbest[g, j]
                    gobj = pobj[g]
                    gviol = pviol[g]
                if element_best:
                    for j in range(m):
                        for i in range(n_p):
                            for jj in range(m):
                                trial[i, jj] = gbest[jj]
                            trial[i, j] = pbest[i, j]
                        bad = _gains(trial, r, height, feed_x, wavelength, guided_wavelength,
                                     eta, re, im)
                        if bad:
                            break
                        _score(re, im, n_er, p, later, nz, total, sinr_floor, energy_floor,
                               obj, viol)
                        for i in range(n_p):
                            if not _clear(trial, i, j, min_spacing):
                                viol[i] = INFINITY
                        g = _best_index(obj, viol)
                        if _better(obj[g], viol[g], gobj, gviol):
                            for jj in range(m):
                                gbest[jj] = trial[g, jj]
                            gobj = obj[g]
                            gviol = viol[g]
                    if bad:
                        break
                hist[t, 0] = gobj
                hist[t, 1] = gviol
    if bad:
        raise DegenerateGeometryError("receiver coincides with an antenna")
    return gbest_a, gobj, gviol, hist_a
