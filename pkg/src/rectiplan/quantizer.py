"""Rounding relaxed schemes to physical switch states, and measuring what that costs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretization import LevelVector, TimeGrid, VoltageTemplate, line_templates, single_phase_template
from .errors import DegenerateRow, OutOfRange
from .lp import FEAS_TOL
from .single_phase import RelaxedSchemeSingle, output_voltage_single
from .three_phase import (LegState, RelaxedSchemeThree, ThreePhaseSpec, one_hot_three,
                          output_voltage_three, phase_currents)

TIE_TOL = 1e-12
THREE_TIE_TOL = 1e-9
MIN_MASS = 1e-6


@dataclass(frozen=True, eq=False)
class QuantizedScheme:
    """Discrete switching scheme.

    ``states`` holds switch levels (single phase) or :class:`LegState` values
    (three phase).
    """

    phase: str
    states: np.ndarray
    levels: LevelVector
    spec_hash: str | None = None
    relaxed_objective: float | None = None
    literal_currents: bool = field(default=False)

    @property
    def N(self) -> int:
        return self.states.size

    @property
    def x(self) -> np.ndarray:
        """Single-phase switching signal."""
        if self.phase != "single":
            raise AttributeError("three-phase schemes have per-phase currents, see phase_currents()")
        return self.states.astype(float)

    @property
    def Z(self) -> np.ndarray:
        if self.phase == "single":
            S = np.array(self.levels.S)
            return (self.states[:, None] == S[None, :]).astype(float)
        return one_hot_three(self.states, self.levels)

    @property
    def tokens(self) -> list[str]:
        if self.phase == "single":
            return [str(int(s)) for s in self.states]
        return [LegState(int(s)).token for s in self.states]


def _nearest_level(x, S, feas_tol):
    S = np.asarray(S, dtype=float)
    x = np.asarray(x, dtype=float)
    bad = np.abs(x) > 1.0 + 10.0 * feas_tol
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise OutOfRange(f"x[{i}] = {x[i]} lies outside [-1, 1]")
    dist = np.abs(x[:, None] - S[None, :])
    near = dist <= dist.min(axis=1, keepdims=True) + TIE_TOL
    # preference among tied levels: smaller magnitude first, then smaller value
    order = np.lexsort((S, np.abs(S)))
    pick = np.empty(x.size, dtype=int)
    for n in range(x.size):
        pick[n] = next(j for j in order if near[n, j])
    return S[pick].astype(int)


def quantize_single(x, lv: LevelVector, feas_tol: float = FEAS_TOL, *,
                    spec_hash: str | None = None, relaxed_objective: float | None = None) -> QuantizedScheme:
    """Clamp each sample of ``x`` to the nearest switch level."""
    if isinstance(x, RelaxedSchemeSingle):
        spec_hash, relaxed_objective = x.spec.digest(), x.objective
        x = x.x
    states = _nearest_level(x, lv.S, feas_tol)
    return QuantizedScheme("single", states, lv, spec_hash, relaxed_objective)


def leg_masses(Z: np.ndarray, lv: LevelVector) -> np.ndarray:
    """(N, 7) weights of FREE, P12+, P12-, P23+, P23-, P31+, P31- at each index."""
    S = list(lv.S)
    N = Z.shape[1]
    out = np.zeros((N, 7))
    if 0 in S:
        out[:, 0] = Z[:, :, S.index(0)].sum(axis=0)
    for p in range(3):
        out[:, 1 + 2 * p] = Z[p, :, S.index(1)]
        out[:, 2 + 2 * p] = Z[p, :, S.index(-1)]
    return out


def quantize_three(scheme: RelaxedSchemeThree) -> QuantizedScheme:
    """Pick the heaviest of the seven physical states at each index.

    Near-ties resolve in LegState order, FREE first.
    """
    masses = leg_masses(scheme.Z, scheme.levels)
    top = masses.max(axis=1)
    weak = top < MIN_MASS
    if np.any(weak):
        n = int(np.flatnonzero(weak)[0])
        raise DegenerateRow(f"no state carries weight at index {n}")
    states = np.argmax(masses >= top[:, None] - THREE_TIE_TOL, axis=1)
    return QuantizedScheme("three", states.astype(int), scheme.levels, scheme.spec.digest(),
                           scheme.objective, scheme.spec.literal_currents)


@dataclass(frozen=True)
class ResidualReport:
    """Constraint residuals of a waveform, in spectrum-amplitude units.

    Harmonic residuals are ``(2/N)·|projection − target|`` for k ≥ 1 and
    ``(1/N)·|…|`` for k = 0, so a target of zero reads as the harmonic amplitude.
    """

    dc_achieved: float
    dc_error: float
    current_harmonics: dict
    voltage_harmonics: dict
    current_means: tuple

    @property
    def max_harmonic_residual(self) -> float:
        vals = [*self.current_harmonics.values(), *self.voltage_harmonics.values()]
        return max(vals, default=0.0)

    def as_dict(self) -> dict:
        return {
            "dc_achieved": self.dc_achieved,
            "dc_error": self.dc_error,
            "current_harmonics": {str(k): v for k, v in self.current_harmonics.items()},
            "voltage_harmonics": {str(k): v for k, v in self.voltage_harmonics.items()},
            "current_means": list(self.current_means),
            "max_harmonic_residual": self.max_harmonic_residual,
        }


def _harmonic_residual(w, k, target=(0.0, 0.0)):
    N = w.size
    X = np.fft.fft(w)[k]
    # projections on cos and sin rows are Re X and -Im X
    err = abs(complex(X.real - target[0], -X.imag - target[1]))
    return err * (1.0 if k == 0 else 2.0) / N


def _dc_error(spec, dc):
    if spec.dc_interval is None:
        return abs(dc - spec.dc_target)
    lo, hi = spec.dc_interval
    return max(lo - dc, dc - hi, 0.0)


def waveform_residuals(spec, currents, voltage) -> ResidualReport:
    """Residuals from physical waveforms via the FFT, independent of any LP rows."""
    voltage = np.asarray(voltage, dtype=float)
    dc = float(np.mean(voltage))
    cur = {}
    for k in spec.current_zero_harmonics:
        cur[k] = max(_harmonic_residual(np.asarray(c, float), k) for c in currents)
    volt = {l: _harmonic_residual(voltage, l, g) for l, g in spec.voltage_harmonic_bindings.items()}
    return ResidualReport(dc, _dc_error(spec, dc), cur, volt,
                          tuple(float(np.mean(c)) for c in currents))


def residual_report(q, spec, grid: TimeGrid, templates=None) -> ResidualReport:
    """Evaluate every constraint of ``spec`` on scheme ``q`` (quantized or relaxed)."""
    if isinstance(spec, ThreePhaseSpec):
        templates = templates or line_templates(grid)
        Z = q.Z
        currents = phase_currents(Z, 1.0, literal=spec.literal_currents)
        if spec.current_harmonic_mode == "aggregate":
            S = np.array(getattr(q, "levels", spec.levels).S, dtype=float)
            currents = (np.sum(Z @ S, axis=0),)
        voltage = output_voltage_three(Z, templates)
    else:
        if isinstance(templates, VoltageTemplate):
            templates = (templates,)
        template = templates[0] if templates else single_phase_template(grid)
        currents = (q.x,)
        voltage = output_voltage_single(q.x, template)
    return waveform_residuals(spec, currents, voltage)
