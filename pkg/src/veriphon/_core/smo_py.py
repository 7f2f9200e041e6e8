"""Pure-Python SMO solver for the soft-margin SVM dual.

Fallback used when the compiled extension is unavailable. The control flow
and per-step arithmetic mirror _smo.pyx exactly so both backends produce
the same models up to floating-point round-off.

The solver is deterministic: fixed scan order, first-index tie breaking,
no randomization anywhere. The box constraint is per-sample (c[i]) so a
class-weighted slack penalty costs nothing extra.
"""

import numpy as np

STEP_EPS = 1e-8  # minimum significant alpha change (relative)


def _take_step(i1, i2, K, y, c, alpha, errors, b):
    """Optimize the (i1, i2) pair. Returns (changed, new_b)."""
    if i1 == i2:
        return False, b
    alph1 = alpha[i1]
    alph2 = alpha[i2]
    y1 = y[i1]
    y2 = y[i2]
    c1 = c[i1]
    c2 = c[i2]
    e1 = errors[i1]
    e2 = errors[i2]
    s = y1 * y2

    if s > 0:
        low = max(0.0, alph2 + alph1 - c1)
        high = min(c2, alph2 + alph1)
    else:
        low = max(0.0, alph2 - alph1)
        high = min(c2, c1 + alph2 - alph1)
    if low == high:
        return False, b

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
        # flat or concave along the constraint line: compare the dual
        # objective at both clip endpoints
        v1 = e1 + y1 - b - y1 * alph1 * k11 - y2 * alph2 * k12
        v2 = e2 + y2 - b - y1 * alph1 * k12 - y2 * alph2 * k22

        def endpoint(a2_new):
            a1_new = alph1 + s * (alph2 - a2_new)
            return (a1_new + a2_new
                    - 0.5 * k11 * a1_new * a1_new
                    - 0.5 * k22 * a2_new * a2_new
                    - s * k12 * a1_new * a2_new
                    - y1 * v1 * a1_new - y2 * v2 * a2_new)

        lobj = endpoint(low)
        hobj = endpoint(high)
        if lobj > hobj + STEP_EPS:
            a2 = low
        elif lobj < hobj - STEP_EPS:
            a2 = high
        else:
            a2 = alph2

    if abs(a2 - alph2) < STEP_EPS * (a2 + alph2 + STEP_EPS):
        return False, b
    a1 = alph1 + s * (alph2 - a2)
    if a1 < 0.0:
        a1 = 0.0
    elif a1 > c1:
        a1 = c1

    d1 = y1 * (a1 - alph1)
    d2 = y2 * (a2 - alph2)
    b1 = b - e1 - d1 * k11 - d2 * k12
    b2 = b - e2 - d1 * k12 - d2 * k22
    if 0.0 < a1 < c1:
        new_b = b1
    elif 0.0 < a2 < c2:
        new_b = b2
    else:
        new_b = 0.5 * (b1 + b2)

    errors += d1 * K[i1] + d2 * K[i2] + (new_b - b)
    alpha[i1] = a1
    alpha[i2] = a2
    return True, new_b


def _examine(i2, K, y, c, alpha, errors, b, tol):
    y2 = y[i2]
    alph2 = alpha[i2]
    e2 = errors[i2]
    r2 = e2 * y2
    if not ((r2 < -tol and alph2 < c[i2]) or (r2 > tol and alph2 > 0.0)):
        return False, b

    non_bound = np.flatnonzero((alpha > 0.0) & (alpha < c))
    if non_bound.size > 1:
        # second-choice heuristic: maximal |e1 - e2|, first index on ties
        i1 = int(non_bound[np.argmax(np.abs(errors[non_bound] - e2))])
        changed, b = _take_step(i1, i2, K, y, c, alpha, errors, b)
        if changed:
            return True, b
    for i1 in non_bound:
        changed, b = _take_step(int(i1), i2, K, y, c, alpha, errors, b)
        if changed:
            return True, b
    for i1 in range(len(y)):
        changed, b = _take_step(i1, i2, K, y, c, alpha, errors, b)
        if changed:
            return True, b
    return False, b


def kkt_violation(K, y, c, alpha, b):
    """Largest violation of the soft-margin optimality conditions."""
    margins = y * (K @ (alpha * y) + b)
    worst = 0.0
    for i in range(len(y)):
        if alpha[i] < 1e-8:
            v = 1.0 - margins[i]
        elif alpha[i] > c[i] - 1e-8:
            v = margins[i] - 1.0
        else:
            v = abs(margins[i] - 1.0)
        if v > worst:
            worst = v
    return worst


def _recenter_bias(K, y, c, alpha, b):
    """Center b inside the feasible-bias interval of the final alphas.

    When every support vector ends at a bound, the per-step threshold
    update is only a heuristic and can leave b outside the interval the
    optimality conditions allow; the midpoint minimizes the worst-case
    violation that kkt_violation reports. Bound classification mirrors
    kkt_violation exactly.
    """
    g = K @ (alpha * y)
    b_lo = -np.inf
    b_hi = np.inf
    for i in range(len(y)):
        target = y[i] - g[i]
        if alpha[i] < 1e-8:
            if y[i] > 0.0:
                b_lo = max(b_lo, target)
            else:
                b_hi = min(b_hi, target)
        elif alpha[i] > c[i] - 1e-8:
            if y[i] > 0.0:
                b_hi = min(b_hi, target)
            else:
                b_lo = max(b_lo, target)
        else:
            b_lo = max(b_lo, target)
            b_hi = min(b_hi, target)
    if b_hi == np.inf:
        return b_lo if b_lo != -np.inf else b
    if b_lo == -np.inf:
        return b_hi
    return 0.5 * (b_lo + b_hi)


def solve_smo(K, y, c, tol=1e-3, max_passes=100000):
    """Solve the dual on a precomputed Gram matrix.

    K is (n, n), y in {-1, +1}, c the per-sample box bound (usually a
    constant vector). Returns (alpha, b, passes, violation) where
    violation is the final worst-case optimality gap; the caller decides
    whether that constitutes convergence.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    n = len(y)
    alpha = np.zeros(n)
    errors = -y.copy()  # f(x_i) - y_i at alpha = 0, b = 0
    b = 0.0

    examine_all = True
    passes = 0
    while passes < max_passes:
        num_changed = 0
        for i2 in range(n):
            if examine_all or 0.0 < alpha[i2] < c[i2]:
                changed, b = _examine(i2, K, y, c, alpha, errors, b, tol)
                num_changed += changed
        passes += 1
        if examine_all:
            if num_changed == 0:
                break
            examine_all = False
        elif num_changed == 0:
            examine_all = True
    b = _recenter_bias(K, y, c, alpha, b)
    return alpha, b, passes, kkt_violation(K, y, c, alpha, b)
