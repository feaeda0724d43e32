"""Exhaustive enumeration of discrete switching schemes on small grids.

This is the ground truth the LP relaxation is checked against, so it avoids
the LP builders completely: each state's contribution to every constraint
is derived from the physical waveforms (switching level times supply
voltage, grid currents from the leg state), and the enumeration itself runs
in the kernel backend.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .discretization import TimeGrid, line_templates, single_phase_template
from .errors import TooLarge
from .quantizer import QuantizedScheme
from .single_phase import SinglePhaseSpec
from .three_phase import LegState, ThreePhaseSpec, one_hot_three, output_voltage_three, phase_currents

MAX_N_SINGLE = 14
MAX_N_THREE = 8
DEFAULT_TOLERANCE = 0.02
# slack on interval rows, which are inequalities and need no lattice tolerance
INTERVAL_SLACK = 1e-12
_NO_KEY = np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class OracleResult:
    best_cost: float | None
    best_scheme: QuantizedScheme | None
    num_feasible: int
    num_enumerated: int
    # integer cost key used for exact, associative merging
    best_key: int = _NO_KEY
    best_code: int = -1

    def as_dict(self) -> dict:
        return {
            "best_cost": self.best_cost,
            "best_scheme": self.best_scheme.tokens if self.best_scheme is not None else None,
            "num_feasible": self.num_feasible,
            "num_enumerated": self.num_enumerated,
        }


def merge(a: OracleResult, b: OracleResult) -> OracleResult:
    """Combine results of disjoint code ranges: lower cost wins, then the smaller code.

    Associative and commutative, so any partition of the scan gives the
    same answer.
    """
    if (b.best_key, b.best_code if b.best_code >= 0 else _NO_KEY) < \
            (a.best_key, a.best_code if a.best_code >= 0 else _NO_KEY):
        a, b = b, a
    return OracleResult(a.best_cost, a.best_scheme, a.num_feasible + b.num_feasible,
                        a.num_enumerated + b.num_enumerated, a.best_key, a.best_code)


class _Table:
    """Per-(index, state) constraint contributions and costs."""

    def __init__(self, N, n_states):
        self.N, self.n_states = N, n_states
        self.cols, self.lo, self.hi = [], [], []

    def add(self, contrib, lo, hi):
        self.cols.append(np.asarray(contrib, dtype=float))
        self.lo.append(lo)
        self.hi.append(hi)

    def equality(self, contrib, target, tol):
        self.add(contrib, target - tol, target + tol)

    def arrays(self):
        if not self.cols:
            # a vacuous always-satisfied row keeps kernel shapes uniform
            self.add(np.zeros((self.N, self.n_states)), -1.0, 1.0)
        F = np.ascontiguousarray(np.stack(self.cols, axis=-1))
        return F, np.array(self.lo), np.array(self.hi)


def _add_common_rows(table, spec, voltage, currents, tol):
    """Rows shared by both topologies, all normalized by N.

    ``voltage[n, s]`` is the load voltage and ``currents`` a list of
    ``[n, s]`` current arrays for state s at index n.
    """
    N = table.N
    n = np.arange(N)
    for k in spec.current_zero_harmonics:
        arg = 2.0 * np.pi * ((k * n) % N) / N
        for cur in currents:
            table.equality(np.cos(arg)[:, None] * cur / N, 0.0, tol)
            table.equality(np.sin(arg)[:, None] * cur / N, 0.0, tol)
    if spec.dc_interval is None:
        table.equality(voltage / N, spec.dc_target, tol)
    else:
        lo, hi = spec.dc_interval
        table.add(voltage / N, lo - INTERVAL_SLACK, hi + INTERVAL_SLACK)
    for l, (gc, gs) in spec.voltage_harmonic_bindings.items():
        arg = 2.0 * np.pi * ((l * n) % N) / N
        table.equality(np.cos(arg)[:, None] * voltage / N, gc / N, tol)
        table.equality(np.sin(arg)[:, None] * voltage / N, gs / N, tol)


def _run(F, C, lo, hi, n_states, N, workers):
    total = n_states ** N
    if workers <= 1:
        parts = [(0, total)]
    else:
        step = -(-total // workers)
        parts = [(a, min(a + step, total)) for a in range(0, total, step)]

    def scan(bounds):
        return _kernels.enumerate_range(F, C, lo, hi, bounds[0], bounds[1])

    if len(parts) == 1:
        results = [scan(parts[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(scan, parts))
    return results, parts


def _decode(code, n_states, N):
    digits = np.zeros(N, dtype=int)
    for i in range(N - 1, -1, -1):
        digits[i] = code % n_states
        code //= n_states
    return digits


def _finish(results, parts, states_of, make_scheme):
    merged = None
    for (key, cost, code, feasible), (a, b) in zip(results, parts):
        scheme = make_scheme(states_of(code)) if code >= 0 else None
        r = OracleResult(float(cost) if code >= 0 else None, scheme, int(feasible), b - a,
                         int(key), int(code))
        merged = r if merged is None else merge(merged, r)
    return merged


def enumerate_single(spec: SinglePhaseSpec, grid: TimeGrid, tolerance: float = DEFAULT_TOLERANCE,
                     template=None, workers: int = 1) -> OracleResult:
    """Best single-phase scheme over all ``levels**N`` candidates.

    Equality constraints pass when their N-normalized residual is within
    ``tolerance``; a DC interval is enforced exactly.
    """
    spec.validate(grid)
    N = grid.N
    if N > MAX_N_SINGLE:
        raise TooLarge(f"N={N} exceeds the single-phase enumeration cap of {MAX_N_SINGLE}")
    template = template or single_phase_template(grid)
    lv = spec.levels
    S = np.array(lv.S, dtype=float)
    x = np.broadcast_to(S, (N, S.size))
    voltage = template.samples[:, None] * x
    C = (1.0 + spec.lam * template.samples_sq)[:, None] * np.abs(x) / N

    table = _Table(N, S.size)
    if spec.current_zero_mean:
        table.equality(x / N, 0.0, tolerance)
    _add_common_rows(table, spec, voltage, [x], tolerance)
    F, lo, hi = table.arrays()
    results, parts = _run(F, np.ascontiguousarray(C), lo, hi, S.size, N, workers)

    def make(states):
        return QuantizedScheme("single", S[states].astype(int), lv, spec.digest())

    return _finish(results, parts, lambda c: _decode(c, S.size, N), make)


def _three_state_table(spec: ThreePhaseSpec, templates):
    """Voltage, per-phase currents and cost for every (index, LegState)."""
    lv = spec.levels
    states = [s for s in LegState if lv.free_wheel or s is not LegState.FREE]
    N = templates[0].samples.size
    voltage = np.zeros((N, len(states)))
    currents = np.zeros((3, N, len(states)))
    cost = np.zeros((N, len(states)))
    for j, st in enumerate(states):
        Z = one_hot_three(np.full(N, st.value), lv)
        voltage[:, j] = output_voltage_three(Z, templates)
        currents[:, :, j] = phase_currents(Z, 1.0, literal=spec.literal_currents)
        if st is not LegState.FREE:
            p, _ = st.pair_sign
            cost[:, j] = (1.0 + 0.5 * spec.lam * templates[p].samples_sq) / N
    return states, voltage, currents, cost


def enumerate_three(spec: ThreePhaseSpec, grid: TimeGrid, tolerance: float = DEFAULT_TOLERANCE,
                    templates=None, workers: int = 1) -> OracleResult:
    """Best three-phase scheme over all LegState sequences (7 or 6 states per index)."""
    spec.validate(grid)
    N = grid.N
    if N > MAX_N_THREE:
        raise TooLarge(f"N={N} exceeds the three-phase enumeration cap of {MAX_N_THREE}")
    templates = templates or line_templates(grid)
    states, voltage, currents, C = _three_state_table(spec, templates)

    table = _Table(N, len(states))
    for i in range(3):
        table.equality(currents[i] / N, 0.0, tolerance)
    if spec.current_harmonic_mode == "aggregate":
        S_sum = np.zeros((N, len(states)))
        for j, st in enumerate(states):
            S_sum[:, j] = 0.0 if st is LegState.FREE else st.pair_sign[1]
        harmonic_currents = [S_sum]
    else:
        harmonic_currents = list(currents)
    _add_common_rows(table, spec, voltage, harmonic_currents, tolerance)
    F, lo, hi = table.arrays()
    results, parts = _run(F, np.ascontiguousarray(C), lo, hi, len(states), N, workers)
    values = np.array([s.value for s in states])

    def make(idx):
        return QuantizedScheme("three", values[idx], spec.levels, spec.digest(),
                               literal_currents=spec.literal_currents)

    return _finish(results, parts, lambda c: _decode(c, len(states), N), make)
