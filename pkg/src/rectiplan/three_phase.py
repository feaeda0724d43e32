"""Three-phase full-bridge rectifier: LP assembly, solve and waveform extraction.

Decision variables are three stochastic-like matrices, one per conducting
line pair (12, 23, 31). ``Z[p, n, j]`` is the weight of level ``S[j]`` on
pair ``p`` at time index ``n``; the combined rows over all pairs sum to one,
so at most one pair conducts once quantized.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .discretization import LevelVector, TimeGrid, VoltageTemplate, build_fourier_row, levels, line_templates
from .errors import InfeasibleProblem, LengthMismatch, NonpositiveLoad, SpecInvalid
from .lp import FEAS_TOL, OPT_TOL, LinearProgram, LpStatus, NumericalFailure, solve_lp
from .single_phase import SinglePhaseSpec, _assemble, _dc_rows

PAIRS = ("12", "23", "31")

# CURRENT_SIGNS[phase, pair]: sign with which pair p's signal enters phase current i.
# Pair 12 at +1 drives current into phase 1 and back out of phase 2.
CURRENT_SIGNS = np.array([
    [1.0, 0.0, -1.0],
    [-1.0, 1.0, 0.0],
    [0.0, -1.0, 1.0],
])
# the sum-form incidence, kept only for comparison runs; it breaks x1+x2+x3 = 0
LITERAL_CURRENT_SIGNS = np.array([
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 1.0],
])


class LegState(enum.IntEnum):
    FREE = 0
    P12_POS = 1
    P12_NEG = 2
    P23_POS = 3
    P23_NEG = 4
    P31_POS = 5
    P31_NEG = 6

    @property
    def token(self) -> str:
        if self is LegState.FREE:
            return "FREE"
        pair, sign = self.pair_sign
        return f"P{PAIRS[pair]}{'+' if sign > 0 else '-'}"

    @property
    def pair_sign(self) -> tuple[int, int]:
        """``(pair index, ±1)``; FREE has no pair and raises."""
        if self is LegState.FREE:
            raise ValueError("FREE has no conducting pair")
        return (self.value - 1) // 2, (1 if self.value % 2 else -1)

    @classmethod
    def from_token(cls, token: str) -> "LegState":
        for s in cls:
            if s.token == token:
                return s
        raise ValueError(f"unknown leg state {token!r}")


@dataclass(frozen=True)
class ThreePhaseSpec(SinglePhaseSpec):
    """Single-phase fields plus the three-phase modelling switches.

    ``current_harmonic_mode`` is ``"per_phase"`` (each grid current) or
    ``"aggregate"`` (the summed pair signal ``(Z12+Z23+Z31)·S``).
    """

    literal_currents: bool = False
    current_harmonic_mode: str = "per_phase"

    def validate(self, grid: TimeGrid | None = None):
        super().validate(grid)
        if self.current_harmonic_mode not in ("per_phase", "aggregate"):
            raise SpecInvalid(f"unknown current_harmonic_mode {self.current_harmonic_mode!r}")
        if self.N % 3:
            warnings.warn(f"N={self.N} is not divisible by 3; phase symmetry is not representable",
                          stacklevel=3)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(literal_currents=self.literal_currents, current_harmonic_mode=self.current_harmonic_mode)
        return d


def _levels_for(m: int) -> LevelVector:
    if m == 3:
        return levels(True)
    if m == 2:
        return levels(False)
    raise LengthMismatch(f"cannot infer switch levels from {m} columns")


@dataclass(frozen=True, eq=False)
class RelaxedSchemeThree:
    Z: np.ndarray  # (3, N, m)
    x: np.ndarray  # (3, N) phase currents per unit load current
    v_out: np.ndarray
    objective: float
    levels: LevelVector
    spec: ThreePhaseSpec

    @property
    def Z12(self):
        return self.Z[0]

    @property
    def Z23(self):
        return self.Z[1]

    @property
    def Z31(self):
        return self.Z[2]


def _signals(Z, lv: LevelVector) -> np.ndarray:
    """Per-pair signed signals ``Z_p · S``, shape (3, N)."""
    S, _ = lv.as_arrays()
    return Z @ S


def build_three_phase_lp(spec: ThreePhaseSpec, grid: TimeGrid,
                         templates: tuple[VoltageTemplate, ...] | None = None) -> LinearProgram:
    """Variables: Z12, Z23, Z31 concatenated, each row-major; index ``p*N*m + n*m + j``."""
    spec.validate(grid)
    templates = templates or line_templates(grid)
    if len(templates) != 3 or any(len(t) != grid.N for t in templates):
        raise SpecInvalid("three-phase program needs three templates of length N")
    N = grid.N
    S, S_p = spec.levels.as_arrays()
    m = S.size
    nv = 3 * N * m
    signs = LITERAL_CURRENT_SIGNS if spec.literal_currents else CURRENT_SIGNS

    cost = np.concatenate([
        np.outer((1.0 + 0.5 * spec.lam * t.samples_sq) / N, S_p).ravel() for t in templates
    ])

    def through_pairs(weights):
        # weights[p] is a length-N row acting on pair p's signal Z_p·S
        return np.concatenate([np.outer(w, S).ravel() for w in weights])

    def on_phase(i, w):
        return through_pairs([signs[i, p] * w for p in range(3)])

    rows_eq, rows_ub = [], []
    for n in range(N):
        r = np.zeros(nv)
        for p in range(3):
            r[p * N * m + n * m: p * N * m + (n + 1) * m] = 1.0
        rows_eq.append((f"rowsum[{n}]", r, 1.0))
    for i in range(3):
        rows_eq.append((f"current_mean[{i + 1}]", on_phase(i, np.ones(N)), 0.0))
    for k in spec.current_zero_harmonics:
        f = build_fourier_row(grid, k)
        if spec.current_harmonic_mode == "per_phase":
            for i in range(3):
                rows_eq.append((f"current{i + 1}_cos[{k}]", on_phase(i, f.cos_row), 0.0))
                rows_eq.append((f"current{i + 1}_sin[{k}]", on_phase(i, f.sin_row), 0.0))
        else:
            rows_eq.append((f"current_cos[{k}]", through_pairs([f.cos_row] * 3), 0.0))
            rows_eq.append((f"current_sin[{k}]", through_pairs([f.sin_row] * 3), 0.0))
    _dc_rows(spec, rows_eq, rows_ub, through_pairs([t.samples / N for t in templates]))
    for l, (gc, gs) in spec.voltage_harmonic_bindings.items():
        f = build_fourier_row(grid, l)
        rows_eq.append((f"voltage_cos[{l}]", through_pairs([f.cos_row * t.samples for t in templates]), gc))
        rows_eq.append((f"voltage_sin[{l}]", through_pairs([f.sin_row * t.samples for t in templates]), gs))
    return _assemble(nv, cost, rows_eq, rows_ub)


def solve_three_phase(spec: ThreePhaseSpec, grid: TimeGrid,
                      templates: tuple[VoltageTemplate, ...] | None = None,
                      feas_tol: float = FEAS_TOL, opt_tol: float = OPT_TOL,
                      rule: str = "dantzig") -> RelaxedSchemeThree:
    templates = templates or line_templates(grid)
    lp = build_three_phase_lp(spec, grid, templates)
    sol = solve_lp(lp, feas_tol=feas_tol, opt_tol=opt_tol, rule=rule)
    if sol.status is LpStatus.INFEASIBLE:
        raise InfeasibleProblem("three-phase program is infeasible", lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"bounded program reported {sol.status.value}")
    Z = sol.x.reshape(3, grid.N, spec.levels.m)
    x = phase_currents(Z, 1.0, literal=spec.literal_currents)
    v = output_voltage_three(Z, templates)
    return RelaxedSchemeThree(Z=Z, x=np.array(x), v_out=v, objective=sol.objective,
                              levels=spec.levels, spec=spec)


def _Z_of(scheme) -> np.ndarray:
    Z = np.asarray(getattr(scheme, "Z", scheme), dtype=float)
    if Z.ndim != 3 or Z.shape[0] != 3:
        raise LengthMismatch(f"expected Z of shape (3, N, m), got {Z.shape}")
    return Z


def output_voltage_three(scheme, templates) -> np.ndarray:
    """Load voltage ``Σ_p template_p[n] · (Z_p[n, :] · S)``."""
    Z = _Z_of(scheme)
    samples = np.array([t.samples if isinstance(t, VoltageTemplate) else np.asarray(t, float)
                        for t in templates])
    if samples.shape != Z.shape[:2]:
        raise LengthMismatch(f"templates {samples.shape} do not match scheme {Z.shape[:2]}")
    return np.sum(samples * _signals(Z, _levels_for(Z.shape[2])), axis=0)


def phase_currents(scheme, load_current: float = 1.0, literal: bool | None = None):
    """Grid currents ``(i1, i2, i3)`` for a constant load current."""
    if not load_current > 0:
        raise NonpositiveLoad(f"load current must be positive, got {load_current}")
    Z = _Z_of(scheme)
    if literal is None:
        spec = getattr(scheme, "spec", None)
        literal = bool(getattr(spec, "literal_currents", False))
    signs = LITERAL_CURRENT_SIGNS if literal else CURRENT_SIGNS
    x = signs @ _signals(Z, _levels_for(Z.shape[2]))
    return tuple(load_current * x[i] for i in range(3))


def one_hot_three(states, lv: LevelVector) -> np.ndarray:
    """Z encoding of a LegState sequence."""
    states = np.asarray(states, dtype=int)
    S = list(lv.S)
    Z = np.zeros((3, states.size, lv.m))
    for n, s in enumerate(states):
        st = LegState(int(s))
        if st is LegState.FREE:
            if 0 not in S:
                raise ValueError("FREE state needs the free-wheeling level")
            # free-wheel mass is split nowhere in particular; pair 12 carries it
            Z[0, n, S.index(0)] = 1.0
        else:
            p, sign = st.pair_sign
            Z[p, n, S.index(sign)] = 1.0
    return Z
