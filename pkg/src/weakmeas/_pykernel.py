"""Pure-Python random-walk Metropolis kernel (fallback for ``_kernel``)."""
import math

import numpy as np

BACKEND = "python"


def log_pi_from_sums(s1, s2, n, log_c, sgn, eps, inv4s2):
    """``log pi`` from the sufficient statistics ``sum x`` and ``sum x^2``."""
    logs = [lc - inv4s2 * (s2 - 2.0 * e * s1 + n * e * e) for lc, e in zip(log_c, eps)]
    m = max(logs)
    if m == -math.inf:
        return -math.inf
    acc = 0.0
    for sg, lk in zip(sgn, logs):
        acc += sg * math.exp(lk - m)
    if acc == 0.0:
        return -math.inf
    return 2.0 * (m + math.log(abs(acc)))


def advance(x, log_pi, z, u, sigma_q, log_c, sgn, eps, inv4s2, xi_out, prop=None, work=None):
    n = x.shape[0]
    log_c, sgn, eps = list(log_c), list(sgn), list(eps)
    s1_cur = float(np.sum(x))
    accepts = 0
    for t in range(z.shape[0]):
        cand = x + sigma_q * z[t]
        s1 = float(np.sum(cand))
        s2 = float(cand @ cand)
        lp_star = log_pi_from_sums(s1, s2, n, log_c, sgn, eps, inv4s2)
        if u[t] < math.exp(min(0.0, lp_star - log_pi)):
            x[:] = cand
            log_pi = lp_star
            s1_cur = s1
            accepts += 1
        xi_out[t] = s1_cur / n
    return log_pi, accepts
