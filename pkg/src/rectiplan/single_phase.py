"""Single-phase full-bridge rectifier: LP assembly, solve and waveform extraction."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .discretization import (LevelVector, TimeGrid, VoltageTemplate, build_fourier_row,
                             levels, single_phase_template)
from .errors import InfeasibleProblem, LengthMismatch, NonpositiveLoad, SpecInvalid
from .lp import FEAS_TOL, OPT_TOL, LinearProgram, LpStatus, NumericalFailure, solve_lp


def _bindings(raw) -> dict[int, tuple[float, float]]:
    out = {}
    for k, g in dict(raw).items():
        if isinstance(g, complex):
            g = (g.real, g.imag)
        elif np.isscalar(g):
            g = (float(g), 0.0)
        out[int(k)] = (float(g[0]), float(g[1]))
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class SinglePhaseSpec:
    """Problem data shared by the single- and three-phase builders.

    ``voltage_harmonic_bindings`` maps a harmonic index to the target of its
    (cosine, sine) projection of the output voltage. ``dc_interval``, when set,
    replaces the exact DC equality by ``lo ≤ DC ≤ hi``.
    """

    N: int
    free_wheel: bool = True
    dc_target: float = 0.0
    lam: float = 0.0
    current_zero_harmonics: tuple = ()
    voltage_harmonic_bindings: dict = field(default_factory=dict)
    dc_interval: tuple | None = None
    current_zero_mean: bool = False

    def __post_init__(self):
        object.__setattr__(self, "current_zero_harmonics",
                           tuple(sorted({int(k) for k in self.current_zero_harmonics})))
        object.__setattr__(self, "voltage_harmonic_bindings", _bindings(self.voltage_harmonic_bindings))
        if self.dc_interval is not None:
            lo, hi = (float(v) for v in self.dc_interval)
            object.__setattr__(self, "dc_interval", (lo, hi))
        self.validate()

    @property
    def levels(self) -> LevelVector:
        return levels(self.free_wheel)

    def validate(self, grid: TimeGrid | None = None):
        if grid is not None and grid.N != self.N:
            raise SpecInvalid(f"grid has N={grid.N}, spec has N={self.N}")
        if not np.isfinite(self.dc_target):
            raise SpecInvalid("dc_target must be finite")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise SpecInvalid("lambda must be a finite non-negative number")
        if 1 in self.current_zero_harmonics:
            raise SpecInvalid("harmonic 1 cannot be eliminated from the input current")
        for k in (*self.current_zero_harmonics, *self.voltage_harmonic_bindings):
            if k < 0 or 2 * k >= self.N:
                raise SpecInvalid(f"harmonic {k} is not below N/2 = {self.N / 2}")
        if self.dc_interval is not None:
            lo, hi = self.dc_interval
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise SpecInvalid(f"bad dc_interval {self.dc_interval}")

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "free_wheel": self.free_wheel,
            "dc_target": self.dc_target,
            "lambda": self.lam,
            "current_zero_harmonics": list(self.current_zero_harmonics),
            "voltage_harmonic_bindings": {str(k): list(g) for k, g in self.voltage_harmonic_bindings.items()},
            "dc_interval": list(self.dc_interval) if self.dc_interval else None,
            "current_zero_mean": self.current_zero_mean,
        }

    def digest(self) -> str:
        blob = json.dumps({"type": type(self).__name__, **self.to_dict()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class RelaxedSchemeSingle:
    Z: np.ndarray
    x: np.ndarray
    objective: float
    levels: LevelVector
    spec: SinglePhaseSpec

    @property
    def conduction_mass(self) -> np.ndarray:
        _, S_p = self.levels.as_arrays()
        return self.Z @ (S_p > 0)


def _dc_rows(spec, rows_eq, rows_ub, coeffs):
    """Append the exact DC equality or the two interval rows."""
    if spec.dc_interval is None:
        rows_eq.append(("dc", coeffs, spec.dc_target))
    else:
        lo, hi = spec.dc_interval
        rows_ub.append(("dc_hi", coeffs, hi))
        rows_ub.append(("dc_lo", -coeffs, -lo))


def _assemble(num_vars, cost, rows_eq, rows_ub):
    def split(rows):
        if not rows:
            return None, None, ()
        return (np.array([r for _, r, _ in rows]), np.array([b for _, _, b in rows]),
                tuple(lab for lab, _, _ in rows))

    A_eq, b_eq, l_eq = split(rows_eq)
    A_ub, b_ub, l_ub = split(rows_ub)
    return LinearProgram(cost=cost, eq_matrix=A_eq, eq_rhs=b_eq, ineq_matrix=A_ub, ineq_rhs=b_ub,
                         eq_labels=l_eq, ineq_labels=l_ub)


def build_single_phase_lp(spec: SinglePhaseSpec, grid: TimeGrid,
                          template: VoltageTemplate | None = None) -> LinearProgram:
    """Variables are the entries of Z (N×m) in row-major order, index ``n*m + j``."""
    spec.validate(grid)
    template = template or single_phase_template(grid)
    if len(template) != grid.N:
        raise SpecInvalid(f"template has {len(template)} samples, grid has {grid.N}")
    N = grid.N
    S, S_p = spec.levels.as_arrays()
    m = S.size
    s = template.samples

    cost = np.outer((1.0 + spec.lam * template.samples_sq) / N, S_p).ravel()

    def through_x(w):
        # row acting on x = Z S, expressed on the Z entries
        return np.outer(w, S).ravel()

    rows_eq, rows_ub = [], []
    for n in range(N):
        r = np.zeros(N * m)
        r[n * m:(n + 1) * m] = 1.0
        rows_eq.append((f"rowsum[{n}]", r, 1.0))
    if spec.current_zero_mean:
        rows_eq.append(("current_mean", through_x(np.ones(N)), 0.0))
    for k in spec.current_zero_harmonics:
        f = build_fourier_row(grid, k)
        rows_eq.append((f"current_cos[{k}]", through_x(f.cos_row), 0.0))
        rows_eq.append((f"current_sin[{k}]", through_x(f.sin_row), 0.0))
    _dc_rows(spec, rows_eq, rows_ub, through_x(s / N))
    for l, (gc, gs) in spec.voltage_harmonic_bindings.items():
        f = build_fourier_row(grid, l)
        rows_eq.append((f"voltage_cos[{l}]", through_x(f.cos_row * s), gc))
        rows_eq.append((f"voltage_sin[{l}]", through_x(f.sin_row * s), gs))
    return _assemble(N * m, cost, rows_eq, rows_ub)


def solve_single_phase(spec: SinglePhaseSpec, grid: TimeGrid, template: VoltageTemplate | None = None,
                       feas_tol: float = FEAS_TOL, opt_tol: float = OPT_TOL,
                       rule: str = "dantzig") -> RelaxedSchemeSingle:
    """Solve the single-phase LP; raises :class:`InfeasibleProblem` if it has no solution."""
    lp = build_single_phase_lp(spec, grid, template)
    sol = solve_lp(lp, feas_tol=feas_tol, opt_tol=opt_tol, rule=rule)
    if sol.status is LpStatus.INFEASIBLE:
        raise InfeasibleProblem("single-phase program is infeasible", lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise NumericalFailure(f"bounded program reported {sol.status.value}")
    S, _ = spec.levels.as_arrays()
    Z = sol.x.reshape(grid.N, S.size)
    return RelaxedSchemeSingle(Z=Z, x=Z @ S, objective=sol.objective, levels=spec.levels, spec=spec)


def output_voltage_single(x, template) -> np.ndarray:
    samples = template.samples if isinstance(template, VoltageTemplate) else np.asarray(template, float)
    x = np.asarray(x, dtype=float)
    if x.shape != samples.shape:
        raise LengthMismatch(f"switching signal has {x.size} samples, template has {samples.size}")
    return samples * x


def input_current_single(x, load_current: float = 1.0) -> np.ndarray:
    if not load_current > 0:
        raise NonpositiveLoad(f"load current must be positive, got {load_current}")
    return load_current * np.asarray(x, dtype=float)
