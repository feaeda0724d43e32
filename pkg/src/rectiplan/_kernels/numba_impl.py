"""numba-compiled versions of the hot kernels (see ``numpy_impl`` for contracts)."""

import numpy as np
from numba import njit

from .numpy_impl import COST_QUANTUM

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def pivot(T, r, c):
    rows, cols = T.shape
    p = T[r, c]
    for j in range(cols):
        T[r, j] /= p
    for i in range(rows):
        if i == r:
            continue
        f = T[i, c]
        if f == 0.0:
            continue
        for j in range(cols):
            T[i, j] -= f * T[r, j]
        T[i, c] = 0.0
    T[r, c] = 1.0


@njit(**_opts)
def enumerate_range(F, C, lo, hi, start, stop):
    N, S, R = F.shape
    best_key = np.iinfo(np.int64).max
    best_cost = np.inf
    best_code = -1
    num_feasible = 0
    digits = np.zeros(N, dtype=np.int64)
    vals = np.zeros(R)
    for code in range(start, stop):
        rest = code
        for n in range(N - 1, -1, -1):
            digits[n] = rest % S
            rest //= S
        vals[:] = 0.0
        cost = 0.0
        for n in range(N):
            s = digits[n]
            for k in range(R):
                vals[k] += F[n, s, k]
            cost += C[n, s]
        ok = True
        for k in range(R):
            if vals[k] < lo[k] or vals[k] > hi[k]:
                ok = False
                break
        if not ok:
            continue
        num_feasible += 1
        key = np.int64(np.rint(cost / COST_QUANTUM))
        if key < best_key:
            best_key = key
            best_cost = cost
            best_code = code
    return best_key, best_cost, best_code, num_feasible


@njit(**_opts)
def rl_response(v, alpha, periods):
    N = v.size
    out = np.empty(N)
    y = 0.0
    for p in range(periods):
        last = p == periods - 1
        for n in range(N):
            if last:
                out[n] = y
            y = alpha * y + (1.0 - alpha) * v[n]
    return out
