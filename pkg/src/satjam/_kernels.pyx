# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernels. Signatures match ``satjam._kernels_py``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, pow, isfinite

cnp.import_array()

cdef enum:
    OK = 0
    NONFINITE = 1
    PROXIMITY = 2


cdef inline void _matvec(const double[:, ::1] M, const double* v, double* out, int rows, int cols) noexcept nogil:
    cdef int i, j
    cdef double s
    for i in range(rows):
        s = 0.0
        for j in range(cols):
            s += M[i, j] * v[j]
        out[i] = s


def rk4_forced(A, B, w0, times, u_nodes, u_mid):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef const double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef const double[:, ::1] un = np.ascontiguousarray(u_nodes, dtype=np.float64)
    cdef const double[:, ::1] um = np.ascontiguousarray(u_mid, dtype=np.float64)
    cdef int n = t.shape[0]
    cdef int dim = a.shape[0]
    cdef int m = b.shape[1]
    out_arr = np.empty((n, dim))
    cdef double[:, ::1] out = out_arr
    cdef double w[16]
    cdef double tmp[16]
    cdef double k1[16]
    cdef double k2[16]
    cdef double k3[16]
    cdef double k4[16]
    cdef double bu0[16]
    cdef double bum[16]
    cdef double bu1[16]
    cdef double h
    cdef int k, i, bad = -1
    if dim > 16:
        raise ValueError("state dimension above 16 is not supported")
    for i in range(dim):
        w[i] = w0[i]
        out[0, i] = w[i]
    with nogil:
        for k in range(n - 1):
            h = t[k + 1] - t[k]
            _matvec(b, &un[k, 0], bu0, dim, m)
            _matvec(b, &um[k, 0], bum, dim, m)
            _matvec(b, &un[k + 1, 0], bu1, dim, m)
            _matvec(a, w, k1, dim, dim)
            for i in range(dim):
                k1[i] += bu0[i]
                tmp[i] = w[i] + 0.5 * h * k1[i]
            _matvec(a, tmp, k2, dim, dim)
            for i in range(dim):
                k2[i] += bum[i]
                tmp[i] = w[i] + 0.5 * h * k2[i]
            _matvec(a, tmp, k3, dim, dim)
            for i in range(dim):
                k3[i] += bum[i]
                tmp[i] = w[i] + h * k3[i]
            _matvec(a, tmp, k4, dim, dim)
            for i in range(dim):
                k4[i] += bu1[i]
                w[i] = w[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                out[k + 1, i] = w[i]
            for i in range(dim):
                if not isfinite(w[i]):
                    bad = k + 1
            if bad >= 0:
                break
    if bad >= 0:
        return out_arr[: bad + 1], bad
    return out_arr, -1


cdef struct Comms:
    double weight
    double pa_ga
    double sigma2
    double fspl_coef
    double peak
    double exponent


cdef inline void _gradient(const double* p, double numer, Comms* cm, double* g) noexcept nogil:
    cdef double x = p[0], y = p[1], z = p[2]
    cdef double r2 = x * x + y * y + z * z
    cdef double r = sqrt(r2)
    cdef double r3 = r2 * r
    cdef double c = -x / r
    cdef double gain = 0.0, comb = 0.0
    if c > 0.0:
        gain = cm.peak * pow(c, cm.exponent)
        comb = -cm.exponent * cm.peak * pow(c, cm.exponent - 1.0)
    cdef double loss = cm.fspl_coef / r2
    cdef double denom = cm.pa_ga * gain * loss + cm.sigma2
    cdef double coef = numer * cm.pa_ga / (denom * denom)
    cdef double a = 2.0 * cm.fspl_coef * gain / (r2 * r2)
    cdef double b = loss * comb
    g[0] = coef * (a * x + b * (-1.0 / r + x * x / r3))
    g[1] = coef * (a * y + b * (x * y / r3))
    g[2] = coef * (a * z + b * (x * z / r3))


cdef inline void _rhs(const double* z, double numer, const double[:, ::1] a,
                      const double[:, ::1] brb, Comms* cm,
                      double* dz) noexcept nogil:
    # z = [w(6), lam(6)]
    cdef int i, j
    cdef double s
    cdef double g[3]
    for i in range(6):
        s = 0.0
        for j in range(6):
            s += a[i, j] * z[j] - brb[i, j] * z[6 + j]
        dz[i] = s
    for i in range(6):
        s = 0.0
        for j in range(6):
            s -= a[j, i] * z[6 + j]
        dz[6 + i] = s
    _gradient(z, numer, cm, g)
    for i in range(3):
        dz[6 + i] -= cm.weight * g[i]


def costate_flow(A, B, Rinv, w0, lam0, times, double weight, numer_nodes, numer_mid,
                 double pa_ga, double sigma2, double fspl_coef, double peak,
                 double exponent, double min_dist):
    A_arr = np.ascontiguousarray(A, dtype=np.float64)
    B_arr = np.asarray(B, dtype=np.float64)
    cdef const double[:, ::1] a = A_arr
    cdef const double[:, ::1] brb = np.ascontiguousarray(B_arr @ np.asarray(Rinv, dtype=np.float64) @ B_arr.T)
    cdef const double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef const double[::1] nn = np.ascontiguousarray(numer_nodes, dtype=np.float64)
    cdef const double[::1] nm = np.ascontiguousarray(numer_mid, dtype=np.float64)
    cdef int n = t.shape[0]
    states_arr = np.empty((n, 6))
    costates_arr = np.empty((n, 6))
    cdef double[:, ::1] st = states_arr
    cdef double[:, ::1] co = costates_arr
    cdef Comms cm
    cm.weight = weight
    cm.pa_ga = pa_ga
    cm.sigma2 = sigma2
    cm.fspl_coef = fspl_coef
    cm.peak = peak
    cm.exponent = exponent
    cdef double z[12]
    cdef double tmp[12]
    cdef double k1[12]
    cdef double k2[12]
    cdef double k3[12]
    cdef double k4[12]
    cdef double h
    cdef int k, i, status = OK, bad = -1
    for i in range(6):
        z[i] = w0[i]
        z[6 + i] = lam0[i]
        st[0, i] = z[i]
        co[0, i] = z[6 + i]
    with nogil:
        for i in range(12):
            if not isfinite(z[i]):
                status = NONFINITE
        if status == OK and sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) < min_dist:
            status = PROXIMITY
        if status != OK:
            bad = 0
        else:
            for k in range(n - 1):
                h = t[k + 1] - t[k]
                _rhs(z, nn[k], a, brb, &cm, k1)
                for i in range(12):
                    tmp[i] = z[i] + 0.5 * h * k1[i]
                _rhs(tmp, nm[k], a, brb, &cm, k2)
                for i in range(12):
                    tmp[i] = z[i] + 0.5 * h * k2[i]
                _rhs(tmp, nm[k], a, brb, &cm, k3)
                for i in range(12):
                    tmp[i] = z[i] + h * k3[i]
                _rhs(tmp, nn[k + 1], a, brb, &cm, k4)
                for i in range(12):
                    z[i] = z[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                for i in range(6):
                    st[k + 1, i] = z[i]
                    co[k + 1, i] = z[6 + i]
                for i in range(12):
                    if not isfinite(z[i]):
                        status = NONFINITE
                if status == OK and sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) < min_dist:
                    status = PROXIMITY
                if status != OK:
                    bad = k + 1
                    break
    if status != OK:
        return states_arr[: bad + 1], costates_arr[: bad + 1], status, bad
    return states_arr, costates_arr, OK, -1
