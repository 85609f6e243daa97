"""Compiled numerical kernels: orthonormalization and two tiny dense LPs.

The simulation loops solve millions of linear programs with at most a few
dozen rows, so the solvers are written as numba kernels over dense
tableaus.  Pivoting uses Bland's rule (smallest eligible index, ties broken
by variable index), which makes every solve deterministic and cycle-free.

Status codes returned by the LP kernels:
    0  optimal
    1  iteration cap exceeded
    2  numerical breakdown (no usable pivot)
    3  stalled: a long run of degenerate pivots with no objective progress
       (the returned value is still primal feasible, hence one-sided)
"""

from __future__ import annotations

import numpy as np
from numba import njit

PIVOT_TOL = 1e-11
MAX_ITER = 20_000


@njit(cache=True)
def span_and_complement(rows, tol):
    """Orthonormal basis of the row span of ``rows`` and of its complement.

    Modified Gram-Schmidt with a second reorthogonalization pass; the
    complement is completed from coordinate vectors chosen greedily by
    largest residual.  Returns (span_rank, Q) where Q is d x d with rows
    0..span_rank-1 spanning the input rows and the remaining rows spanning
    the orthogonal complement.  A row is rejected as dependent when its
    residual norm is <= tol.
    """
    k, d = rows.shape
    Q = np.zeros((d, d))
    rank = 0
    v = np.empty(d)
    for r in range(k):
        for c in range(d):
            v[c] = rows[r, c]
        for _ in range(2):
            for j in range(rank):
                dot = 0.0
                for c in range(d):
                    dot += Q[j, c] * v[c]
                for c in range(d):
                    v[c] -= dot * Q[j, c]
        nrm = 0.0
        for c in range(d):
            nrm += v[c] * v[c]
        nrm = np.sqrt(nrm)
        if nrm > tol:
            for c in range(d):
                Q[rank, c] = v[c] / nrm
            rank += 1
    span_rank = rank

    # Complete with the coordinate vector of largest residual each round;
    # that residual is always >= 1/sqrt(d) while slots remain, so the
    # completion cannot stall.
    used = np.zeros(d, dtype=np.bool_)
    while rank < d:
        best = -1
        best_norm = 0.0
        for e in range(d):
            if used[e]:
                continue
            for c in range(d):
                v[c] = 0.0
            v[e] = 1.0
            for j in range(rank):
                dot = 0.0
                for c in range(d):
                    dot += Q[j, c] * v[c]
                for c in range(d):
                    v[c] -= dot * Q[j, c]
            nrm = 0.0
            for c in range(d):
                nrm += v[c] * v[c]
            if nrm > best_norm:
                best_norm = nrm
                best = e
        if best < 0:
            break
        used[best] = True
        for c in range(d):
            v[c] = 0.0
        v[best] = 1.0
        for _ in range(2):
            for j in range(rank):
                dot = 0.0
                for c in range(d):
                    dot += Q[j, c] * v[c]
                for c in range(d):
                    v[c] -= dot * Q[j, c]
        nrm = 0.0
        for c in range(d):
            nrm += v[c] * v[c]
        nrm = np.sqrt(nrm)
        for c in range(d):
            Q[rank, c] = v[c] / nrm
        rank += 1
    return span_rank, Q


@njit(cache=True)
def max_margin_lp(points):
    """Maximize t subject to <u, p_j> + t <= 0 and -1 <= u_i <= 1.

    ``points`` is (M, m).  Substituting w = u + 1 in [0, 2] gives equality
    rows  <w, p_j> + t + s_j = sigma_j  with slack s_j >= 0 and
    sigma_j = sum_i p_ji, and the basis {t} + {s_j : j != j0} with
    j0 = argmin sigma is feasible outright, so no phase 1 is needed.  The
    free variable t never leaves the basis (a free variable never blocks
    the ratio test), which keeps the reduced costs one tableau row away.

    Returns (status, t_star).  The optimum is >= 0 always, equals 0 exactly
    when the points positively span, and is the best separation margin
    otherwise.
    """
    M, m = points.shape
    n = m + 1 + M  # w variables, t, slacks
    t_col = m

    sigma = np.empty(M)
    for j in range(M):
        s = 0.0
        for i in range(m):
            s += points[j, i]
        sigma[j] = s
    j0 = 0
    for j in range(1, M):
        if sigma[j] < sigma[j0]:
            j0 = j

    # Tableau holds B^{-1}[A | b]; column order: w_0..w_{m-1}, t, s_0..s_{M-1}.
    T = np.zeros((M, n + 1))
    for j in range(M):
        for i in range(m):
            T[j, i] = points[j, i]
        T[j, t_col] = 1.0
        T[j, m + 1 + j] = 1.0
        T[j, n] = sigma[j]
    for j in range(M):
        if j != j0:
            for c in range(n + 1):
                T[j, c] -= T[j0, c]

    basis = np.empty(M, dtype=np.int64)
    for j in range(M):
        basis[j] = m + 1 + j
    basis[j0] = t_col
    # Variable states: 0 nonbasic at lower, 1 nonbasic at upper, 2 basic.
    state = np.zeros(n, dtype=np.int64)
    for j in range(M):
        state[basis[j]] = 2

    # Degenerate optima (e.g. positively spanning inputs, where t* = 0 with
    # many optimal bases) can make rounding noise in the reduced costs churn
    # forever; a long run of pivots with no objective progress ends the
    # solve with the current (primal feasible) value.
    best_obj = T[j0, n]
    stalled = 0
    stall_limit = 2 * (n + M) + 50

    for _ in range(MAX_ITER):
        if T[j0, n] > best_obj + 1e-13:
            best_obj = T[j0, n]
            stalled = 0
        else:
            stalled += 1
            if stalled > stall_limit:
                return 3, T[j0, n]
        # Reduced cost of column j is T[j0, j] (minimizing -t, t basic in j0).
        enter = -1
        direction = 0.0
        for j in range(n):
            st = state[j]
            if st == 2:
                continue
            rc = T[j0, j]
            if st == 0 and rc < -PIVOT_TOL:
                enter = j
                direction = 1.0
                break
            if st == 1 and rc > PIVOT_TOL:
                enter = j
                direction = -1.0
                break
        if enter < 0:
            return 0, T[j0, n]

        # Ratio test: basic value row i moves by -direction * step * T[i, enter].
        step = np.inf
        leave_row = -1
        leave_to_upper = False
        for i in range(M):
            var = basis[i]
            if var == t_col:
                continue  # free variable never blocks
            coeff = direction * T[i, enter]
            if coeff > PIVOT_TOL:
                # moving down toward lower bound 0
                ratio = T[i, n] / coeff
                if ratio < 0.0:
                    ratio = 0.0  # feasibility drift: degenerate step, not backward
                if ratio < step - 1e-15 or (
                    ratio <= step + 1e-15 and (leave_row < 0 or var < basis[leave_row])
                ):
                    step = ratio
                    leave_row = i
                    leave_to_upper = False
            elif coeff < -PIVOT_TOL and var < t_col:
                # w variables are capped at 2; slacks have no upper bound
                ratio = (2.0 - T[i, n]) / (-coeff)
                if ratio < 0.0:
                    ratio = 0.0
                if ratio < step - 1e-15 or (
                    ratio <= step + 1e-15 and (leave_row < 0 or var < basis[leave_row])
                ):
                    step = ratio
                    leave_row = i
                    leave_to_upper = True

        can_flip = enter < m  # w bound width is 2; slacks cannot flip
        if can_flip and 2.0 <= step:
            # Bound flip: no basis change, the basic values shift.
            for i in range(M):
                T[i, n] -= direction * 2.0 * T[i, enter]
            state[enter] = 1 - state[enter]
            continue
        if leave_row < 0 or not np.isfinite(step):
            return 2, T[j0, n]

        # The rhs column stores basic-variable values (not classical B^-1 b),
        # so it is updated by the step and excluded from the row reduction.
        for i in range(M):
            T[i, n] -= direction * step * T[i, enter]
        entering_value = direction * step + (2.0 if state[enter] == 1 else 0.0)
        piv = T[leave_row, enter]
        if abs(piv) < PIVOT_TOL:
            return 2, T[j0, n]
        out_var = basis[leave_row]
        state[out_var] = 1 if leave_to_upper else 0
        inv = 1.0 / piv
        for c in range(n):
            T[leave_row, c] *= inv
        for i in range(M):
            if i == leave_row:
                continue
            f = T[i, enter]
            if f != 0.0:
                for c in range(n):
                    T[i, c] -= f * T[leave_row, c]
        T[leave_row, n] = entering_value
        basis[leave_row] = enter
        state[enter] = 2
    return 1, T[j0, n]


@njit(cache=True)
def phase1_infeasibility(A, b):
    """Minimal total artificial value for {x >= 0 : A x = b}.

    Classic phase-1 simplex with Bland's rule; rows are sign-normalized so
    the artificial basis starts feasible.  Returns (status, infeasibility);
    the system is feasible within tolerance when the infeasibility is tiny.
    """
    r, nc = A.shape
    n = nc + r
    T = np.zeros((r, n + 1))
    for i in range(r):
        flip = -1.0 if b[i] < 0.0 else 1.0
        for j in range(nc):
            T[i, j] = flip * A[i, j]
        T[i, nc + i] = 1.0
        T[i, n] = flip * b[i]

    basis = np.empty(r, dtype=np.int64)
    for i in range(r):
        basis[i] = nc + i
    artificial_basic = np.ones(r, dtype=np.bool_)
    is_basic = np.zeros(n, dtype=np.bool_)
    for i in range(r):
        is_basic[basis[i]] = True

    best_obj = np.inf
    stalled = 0
    stall_limit = 2 * (n + r) + 50

    for _ in range(MAX_ITER):
        obj = 0.0
        for i in range(r):
            if artificial_basic[i]:
                obj += T[i, n]
        if obj < best_obj - 1e-13:
            best_obj = obj
            stalled = 0
        else:
            stalled += 1
            if stalled > stall_limit:
                return 3, obj

        enter = -1
        for j in range(nc):  # artificials never re-enter
            if is_basic[j]:
                continue
            rc = 0.0
            for i in range(r):
                if artificial_basic[i]:
                    rc -= T[i, j]
            if rc < -PIVOT_TOL:
                # Require a usable pivot; a negative column with no positive
                # entry is numerically inconsistent for an objective bounded
                # below, so such a column is passed over.
                usable = False
                for i in range(r):
                    if T[i, j] > PIVOT_TOL:
                        usable = True
                        break
                if usable:
                    enter = j
                    break
        if enter < 0:
            obj = 0.0
            for i in range(r):
                if artificial_basic[i]:
                    obj += T[i, n]
            return 0, obj

        step = np.inf
        leave_row = -1
        for i in range(r):
            coeff = T[i, enter]
            if coeff > PIVOT_TOL:
                ratio = T[i, n] / coeff
                if ratio < 0.0:
                    ratio = 0.0
                if ratio < step - 1e-15 or (
                    ratio <= step + 1e-15 and (leave_row < 0 or basis[i] < basis[leave_row])
                ):
                    step = ratio
                    leave_row = i
        if leave_row < 0:
            return 2, np.inf

        piv = T[leave_row, enter]
        inv = 1.0 / piv
        for c in range(n + 1):
            T[leave_row, c] *= inv
        for i in range(r):
            if i == leave_row:
                continue
            f = T[i, enter]
            if f != 0.0:
                for c in range(n + 1):
                    T[i, c] -= f * T[leave_row, c]
        is_basic[basis[leave_row]] = False
        is_basic[enter] = True
        basis[leave_row] = enter
        artificial_basic[leave_row] = False

    obj = 0.0
    for i in range(r):
        if artificial_basic[i]:
            obj += T[i, n]
    return 1, obj
