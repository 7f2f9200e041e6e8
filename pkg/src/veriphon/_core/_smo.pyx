# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO solver for the soft-margin SVM dual.

Same algorithm, scan order and per-step arithmetic as smo_py.py; kept in
lockstep so the two backends agree up to floating-point round-off.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()

DEF STEP_EPS = 1e-8


cdef double _endpoint(double a2_new, double alph1, double alph2, double s,
                      double y1, double y2, double v1, double v2,
                      double k11, double k22, double k12) nogil:
    cdef double a1_new = alph1 + s * (alph2 - a2_new)
    return (a1_new + a2_new
            - 0.5 * k11 * a1_new * a1_new
            - 0.5 * k22 * a2_new * a2_new
            - s * k12 * a1_new * a2_new
            - y1 * v1 * a1_new - y2 * v2 * a2_new)


cdef bint _take_step(Py_ssize_t i1, Py_ssize_t i2, double[:, ::1] K,
                     double[::1] y, double[::1] c, double[::1] alpha,
                     double[::1] errors, double* b) nogil:
    if i1 == i2:
        return False
    cdef double alph1 = alpha[i1]
    cdef double alph2 = alpha[i2]
    cdef double y1 = y[i1]
    cdef double y2 = y[i2]
    cdef double c1 = c[i1]
    cdef double c2 = c[i2]
    cdef double e1 = errors[i1]
    cdef double e2 = errors[i2]
    cdef double s = y1 * y2
    cdef double low, high, a1, a2
    cdef double k11, k12, k22, eta, v1, v2, lobj, hobj
    cdef double d1, d2, b1, b2, new_b, db
    cdef Py_ssize_t i, n = y.shape[0]

    if s > 0:
        low = max(0.0, alph2 + alph1 - c1)
        high = min(c2, alph2 + alph1)
    else:
        low = max(0.0, alph2 - alph1)
        high = min(c2, c1 + alph2 - alph1)
    if low == high:
        return False

    k11 = K[i1, i1]
    k12 = K[i1, i2]
    k22 = K[i2, i2]
    eta = k11 + k22 - 2.0 * k12
    if eta > 0.0:
        a2 = alph2 + y2 * (e1 - e2) / eta
        if a2 < low:
            a2 = low
        elif a2 > high:
            a2 = high
    else:
        v1 = e1 + y1 - b[0] - y1 * alph1 * k11 - y2 * alph2 * k12
        v2 = e2 + y2 - b[0] - y1 * alph1 * k12 - y2 * alph2 * k22
        lobj = _endpoint(low, alph1, alph2, s, y1, y2, v1, v2, k11, k22, k12)
        hobj = _endpoint(high, alph1, alph2, s, y1, y2, v1, v2, k11, k22, k12)
        if lobj > hobj + STEP_EPS:
            a2 = low
        elif lobj < hobj - STEP_EPS:
            a2 = high
        else:
            a2 = alph2

    if fabs(a2 - alph2) < STEP_EPS * (a2 + alph2 + STEP_EPS):
        return False
    a1 = alph1 + s * (alph2 - a2)
    if a1 < 0.0:
        a1 = 0.0
    elif a1 > c1:
        a1 = c1

    d1 = y1 * (a1 - alph1)
    d2 = y2 * (a2 - alph2)
    b1 = b[0] - e1 - d1 * k11 - d2 * k12
    b2 = b[0] - e2 - d1 * k12 - d2 * k22
    if 0.0 < a1 < c1:
        new_b = b1
    elif 0.0 < a2 < c2:
        new_b = b2
    else:
        new_b = 0.5 * (b1 + b2)

    db = new_b - b[0]
    for i in range(n):
        errors[i] = errors[i] + ((d1 * K[i1, i] + d2 * K[i2, i]) + db)
    alpha[i1] = a1
    alpha[i2] = a2
    b[0] = new_b
    return True


cdef bint _examine(Py_ssize_t i2, double[:, ::1] K, double[::1] y,
                   double[::1] c, double[::1] alpha, double[::1] errors,
                   double* b, double tol) nogil:
    cdef double y2 = y[i2]
    cdef double alph2 = alpha[i2]
    cdef double e2 = errors[i2]
    cdef double r2 = e2 * y2
    cdef Py_ssize_t i1, j, n = y.shape[0]
    cdef Py_ssize_t best = -1
    cdef Py_ssize_t n_non_bound = 0
    cdef double best_val = -1.0, v

    if not ((r2 < -tol and alph2 < c[i2]) or (r2 > tol and alph2 > 0.0)):
        return False

    for j in range(n):
        if 0.0 < alpha[j] < c[j]:
            n_non_bound += 1
            v = fabs(errors[j] - e2)
            if v > best_val:
                best_val = v
                best = j
    if n_non_bound > 1:
        if _take_step(best, i2, K, y, c, alpha, errors, b):
            return True
    for i1 in range(n):
        if 0.0 < alpha[i1] < c[i1]:
            if _take_step(i1, i2, K, y, c, alpha, errors, b):
                return True
    for i1 in range(n):
        if _take_step(i1, i2, K, y, c, alpha, errors, b):
            return True
    return False


cdef double _recenter_bias(double[:, ::1] K, double[::1] y, double[::1] c,
                           double[::1] alpha, double b) nogil:
    # Center b inside the feasible-bias interval of the final alphas;
    # bound classification mirrors kkt_violation exactly.
    cdef Py_ssize_t i, j, n = y.shape[0]
    cdef double g, target
    cdef double b_lo = -INFINITY
    cdef double b_hi = INFINITY
    for i in range(n):
        g = 0.0
        for j in range(n):
            g += K[i, j] * (alpha[j] * y[j])
        target = y[i] - g
        if alpha[i] < 1e-8:
            if y[i] > 0.0:
                if target > b_lo:
                    b_lo = target
            else:
                if target < b_hi:
                    b_hi = target
        elif alpha[i] > c[i] - 1e-8:
            if y[i] > 0.0:
                if target < b_hi:
                    b_hi = target
            else:
                if target > b_lo:
                    b_lo = target
        else:
            if target > b_lo:
                b_lo = target
            if target < b_hi:
                b_hi = target
    if b_hi == INFINITY:
        return b_lo if b_lo != -INFINITY else b
    if b_lo == -INFINITY:
        return b_hi
    return 0.5 * (b_lo + b_hi)


def kkt_violation(K, y, c, alpha, double b):
    """Largest violation of the soft-margin optimality conditions."""
    cdef double[:, ::1] Kv = np.ascontiguousarray(K, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] av = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef Py_ssize_t i, j, n = yv.shape[0]
    cdef double worst = 0.0, acc, margin, v
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += Kv[i, j] * (av[j] * yv[j])
        margin = yv[i] * (acc + b)
        if av[i] < 1e-8:
            v = 1.0 - margin
        elif av[i] > cv[i] - 1e-8:
            v = margin - 1.0
        else:
            v = fabs(margin - 1.0)
        if v > worst:
            worst = v
    return worst


def solve_smo(K, y, c, double tol=1e-3, long max_passes=100000):
    """Solve the dual on a precomputed Gram matrix.

    K is (n, n), y in {-1, +1}, c the per-sample box bound. Returns
    (alpha, b, passes, violation); the caller decides whether the final
    violation counts as convergence.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Ka = \
        np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] ya = \
        np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] ca = \
        np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t n = ya.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] alpha_a = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] errors_a = -ya.copy()

    cdef double[:, ::1] Kv = Ka
    cdef double[::1] yv = ya
    cdef double[::1] cv = ca
    cdef double[::1] alpha = alpha_a
    cdef double[::1] errors = errors_a
    cdef double b = 0.0
    cdef bint examine_all = True
    cdef long passes = 0
    cdef int num_changed
    cdef Py_ssize_t i2

    with nogil:
        while passes < max_passes:
            num_changed = 0
            for i2 in range(n):
                if examine_all or 0.0 < alpha[i2] < cv[i2]:
                    if _examine(i2, Kv, yv, cv, alpha, errors, &b, tol):
                        num_changed += 1
            passes += 1
            if examine_all:
                if num_changed == 0:
                    break
                examine_all = False
            elif num_changed == 0:
                examine_all = True
        b = _recenter_bias(Kv, yv, cv, alpha, b)

    return alpha_a, b, passes, kkt_violation(Ka, ya, ca, alpha_a, b)
