"""Pure-numpy versions of the hot kernels.

Every function here has a twin in ``numba_impl`` with the same signature and
the same floating-point summation order where that matters for determinism.
"""

import numpy as np

# oracle costs are compared on an integer grid so that partitioned scans merge exactly
COST_QUANTUM = 1e-12
CHUNK = 1 << 15


def pivot(T, r, c):
    """Gauss-Jordan pivot of tableau ``T`` on entry (r, c), in place."""
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    nz = np.flatnonzero(col)
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
    T[:, c] = 0.0
    T[r, c] = 1.0


def enumerate_range(F, C, lo, hi, start, stop):
    """Scan scheme codes in ``[start, stop)``.

    ``F[n, s, :]`` is the contribution of state ``s`` at index ``n`` to each
    constraint row, ``C[n, s]`` its cost. Codes are base-S numbers with index 0
    as the most significant digit, so ascending codes are lexicographic.

    Returns ``(best_key, best_cost, best_code, num_feasible)``; ``best_code`` is
    -1 when nothing in the range is feasible.
    """
    N, S, R = F.shape
    weights = S ** np.arange(N - 1, -1, -1, dtype=np.int64)
    best_key = np.iinfo(np.int64).max
    best_cost = np.inf
    best_code = -1
    num_feasible = 0
    for a in range(start, stop, CHUNK):
        codes = np.arange(a, min(a + CHUNK, stop), dtype=np.int64)
        digits = (codes[:, None] // weights[None, :]) % S
        vals = np.zeros((codes.size, R))
        cost = np.zeros(codes.size)
        for n in range(N):
            vals += F[n, digits[:, n]]
            cost += C[n, digits[:, n]]
        ok = np.all((vals >= lo) & (vals <= hi), axis=1)
        num_feasible += int(ok.sum())
        if not ok.any():
            continue
        keys = np.rint(cost / COST_QUANTUM).astype(np.int64)
        keys[~ok] = np.iinfo(np.int64).max
        i = int(np.argmin(keys))
        if keys[i] < best_key:
            best_key = int(keys[i])
            best_cost = float(cost[i])
            best_code = int(codes[i])
    return best_key, best_cost, best_code, num_feasible


def rl_response(v, alpha, periods):
    """Last period of ``y[n+1] = alpha*y[n] + (1-alpha)*v[n]`` driven periodically from rest."""
    N = v.size
    h = (1.0 - alpha) * alpha ** np.arange(N)
    # forced response within one period, zero initial state
    forced = np.concatenate(([0.0], np.convolve(v, h)[:N]))
    decay = alpha ** np.arange(N + 1)
    y0 = 0.0
    for _ in range(periods - 1):
        y0 = decay[N] * y0 + forced[N]
    return decay[:N] * y0 + forced[:N]
