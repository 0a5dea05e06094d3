# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled random-walk Metropolis kernel. Mirrors ``_pykernel.advance``."""
from libc.math cimport exp, log, fabs, INFINITY

import numpy as np

BACKEND = "cython"


cdef inline double _log_pi(double s1, double s2, Py_ssize_t n, const double[::1] log_c,
                           const double[::1] sgn, const double[::1] eps, double inv4s2,
                           double[::1] work) noexcept nogil:
    cdef Py_ssize_t k, nk = log_c.shape[0]
    cdef double m = -INFINITY, acc = 0.0, lk
    for k in range(nk):
        lk = log_c[k] - inv4s2 * (s2 - 2.0 * eps[k] * s1 + n * eps[k] * eps[k])
        work[k] = lk
        if lk > m:
            m = lk
    if m == -INFINITY:
        return -INFINITY
    for k in range(nk):
        acc += sgn[k] * exp(work[k] - m)
    if acc == 0.0:
        return -INFINITY
    return 2.0 * (m + log(fabs(acc)))


def log_pi_from_sums(double s1, double s2, Py_ssize_t n, const double[::1] log_c,
                     const double[::1] sgn, const double[::1] eps, double inv4s2):
    cdef double[::1] work = np.empty(max(1, log_c.shape[0]))
    return _log_pi(s1, s2, n, log_c, sgn, eps, inv4s2, work)


def advance(double[::1] x, double log_pi, const double[:, ::1] z, const double[::1] u,
            double sigma_q, const double[::1] log_c, const double[::1] sgn,
            const double[::1] eps, double inv4s2, double[::1] xi_out,
            double[::1] prop, double[::1] work):
    """Run ``z.shape[0]`` Metropolis steps in place on ``x``.

    Returns the final ``log pi`` and the number of accepted proposals;
    ``xi_out[t]`` receives the chain mean after step ``t``.
    """
    cdef Py_ssize_t n = x.shape[0], m = z.shape[0], t, i
    cdef long accepts = 0
    cdef double s1, s2, v, lp_star, d, s1_cur = 0.0
    with nogil:
        for i in range(n):
            s1_cur += x[i]
        for t in range(m):
            s1 = 0.0
            s2 = 0.0
            for i in range(n):
                v = x[i] + sigma_q * z[t, i]
                prop[i] = v
                s1 += v
                s2 += v * v
            lp_star = _log_pi(s1, s2, n, log_c, sgn, eps, inv4s2, work)
            d = lp_star - log_pi
            if d > 0.0:
                d = 0.0
            if u[t] < exp(d):
                for i in range(n):
                    x[i] = prop[i]
                log_pi = lp_star
                s1_cur = s1
                accepts += 1
            xi_out[t] = s1_cur / n
    return log_pi, accepts
