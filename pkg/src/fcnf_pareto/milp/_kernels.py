"""Dense bounded-variable primal simplex kernel.

The same source runs either compiled by numba or as plain numpy; see
``fcnf_pareto._accel``. Everything here stays inside the numba-supported
subset of numpy.
"""

import numpy as np

from .._accel import njit

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

REFRESH_EVERY = 64


def bounded_simplex(A, b, c, lo, hi, row_slack, max_iter, bland_after, feas_tol, opt_tol, piv_tol):
    """Minimise ``c @ x`` subject to ``A @ x == b`` and ``lo <= x <= hi``.

    ``row_slack[i]`` names a column that appears in row ``i`` only (its slack),
    or -1. Such a slack starts basic when its implied value is within bounds;
    every other row gets an artificial. Artificials are implicit: they occupy
    basis slots ``n + i`` but have no tableau column, and once one leaves
    the basis it never returns.

    Dantzig pricing switches to Bland's rule after ``bland_after``
    consecutive degenerate pivots. Basic values and reduced costs are updated
    incrementally and recomputed from scratch every ``REFRESH_EVERY`` pivots
    and before optimality is declared.

    Returns ``(status, x, pivots)``.
    """
    m, n = A.shape
    x = np.zeros(n + m)
    lo_all = np.zeros(n + m)
    hi_all = np.full(n + m, np.inf)
    lo_all[:n] = lo
    hi_all[:n] = hi
    for j in range(n):
        if lo[j] > -np.inf:
            x[j] = lo[j]
        elif hi[j] < np.inf:
            x[j] = hi[j]

    resid = b - A @ x[:n]
    T = np.empty((m, n))
    beta = np.empty(m)
    basis = np.empty(m, dtype=np.int64)
    is_basic = np.zeros(n, dtype=np.bool_)
    n_art = 0
    for i in range(m):
        j = row_slack[i]
        if j >= 0:
            a = A[i, j]
            v = x[j] + resid[i] / a
            if lo_all[j] - feas_tol <= v <= hi_all[j] + feas_tol:
                T[i] = A[i] / a
                beta[i] = b[i] / a
                basis[i] = j
                is_basic[j] = True
                x[j] = v
                continue
        s = 1.0 if resid[i] >= 0.0 else -1.0
        T[i] = A[i] * s
        beta[i] = b[i] * s
        basis[i] = n + i
        x[n + i] = abs(resid[i])
        n_art += 1

    phase = 1 if n_art > 0 else 2
    d = np.zeros(n)
    cb = np.zeros(m)
    pivots = 0
    degenerate = 0
    since_refresh = 0
    status = ITERATION_LIMIT

    while pivots < max_iter:
        if since_refresh == 0:
            xn = x[:n].copy()
            for i in range(m):
                if basis[i] < n:
                    xn[basis[i]] = 0.0
            xb = beta - T @ xn
            for i in range(m):
                x[basis[i]] = xb[i]
                if phase == 1:
                    cb[i] = 1.0 if basis[i] >= n else 0.0
                else:
                    cb[i] = 0.0 if basis[i] >= n else c[basis[i]]
            if phase == 1:
                d = -(cb @ T)
            else:
                d = c - cb @ T
            for i in range(m):
                if basis[i] < n:
                    d[basis[i]] = 0.0

        movable = (~is_basic) & (hi_all[:n] > lo_all[:n])
        inc = movable & (d < -opt_tol) & (x[:n] < hi_all[:n])
        dec = movable & (d > opt_tol) & (x[:n] > lo_all[:n])
        score = np.where(inc, -d, np.where(dec, d, 0.0))
        bland = degenerate >= bland_after
        enter = -1
        if bland:
            for j in range(n):
                if score[j] > 0.0:
                    enter = j
                    break
        elif n > 0:
            k = np.argmax(score)
            if score[k] > 0.0:
                enter = k

        if enter < 0:
            if since_refresh != 0:
                since_refresh = 0
                continue
            if phase == 1:
                # each artificial is judged against its own row's scale
                feasible = True
                for i in range(m):
                    k = basis[i]
                    if k >= n and x[k] > feas_tol * max(1.0, abs(b[k - n])):
                        feasible = False
                if not feasible:
                    status = INFEASIBLE
                    break
                phase = 2
                hi_all[n:] = 0.0
                degenerate = 0
                continue
            status = OPTIMAL
            break

        dirn = 1.0 if inc[enter] else -1.0
        delta = -dirn * T[:, enter]
        xb = np.empty(m)
        lob = np.empty(m)
        hib = np.empty(m)
        for i in range(m):
            xb[i] = x[basis[i]]
            lob[i] = lo_all[basis[i]]
            hib[i] = hi_all[basis[i]]
        neg = delta < -piv_tol
        pos = delta > piv_tol
        den = np.where(neg, -delta, np.where(pos, delta, 1.0))
        room = np.where(neg, xb - lob, np.where(pos, hib - xb, np.inf))
        lim = np.maximum(room / den, 0.0)
        tmin = np.inf
        if m > 0:
            tmin = np.min(lim)
        flip = hi_all[enter] - lo_all[enter]

        if tmin == np.inf and flip == np.inf:
            status = UNBOUNDED
            break
        pivots += 1
        since_refresh = (since_refresh + 1) % REFRESH_EVERY

        if flip <= tmin:
            for i in range(m):
                x[basis[i]] += flip * delta[i]
            x[enter] = hi_all[enter] if dirn > 0 else lo_all[enter]
            degenerate = 0
            continue

        # leaving row: ties within a small band, then largest pivot (or
        # smallest variable index under Bland)
        band = tmin + 1e-12 * (1.0 + tmin)
        r = -1
        for i in range(m):
            if lim[i] <= band:
                if r < 0:
                    r = i
                elif bland:
                    if basis[i] < basis[r]:
                        r = i
                elif abs(delta[i]) > abs(delta[r]):
                    r = i
        leave = basis[r]
        for i in range(m):
            x[basis[i]] += tmin * delta[i]
        x[leave] = lob[r] if delta[r] < 0.0 else hib[r]
        x[enter] += dirn * tmin
        if leave >= n:
            hi_all[leave] = 0.0

        piv = T[r, enter]
        T[r] = T[r] / piv
        beta[r] = beta[r] / piv
        for i in range(m):
            if i != r:
                f = T[i, enter]
                if f != 0.0:
                    T[i] -= f * T[r]
                    beta[i] -= f * beta[r]
        d -= d[enter] * T[r]
        d[enter] = 0.0
        basis[r] = enter
        if leave < n:
            is_basic[leave] = False
        is_basic[enter] = True
        if tmin <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0

    return status, x[:n].copy(), pivots


bounded_simplex_py = bounded_simplex
bounded_simplex = njit(bounded_simplex)
