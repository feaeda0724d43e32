"""Uniform time grid, supply-voltage templates, Fourier rows and level sets."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AliasedHarmonic, BadCsv, BadN, LengthMismatch

TWO_PI = 2.0 * np.pi
# phase offsets of the three supply phases
PHASE_OFFSETS = (0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0)
LINE_PAIRS = ("s12", "s23", "s31")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeGrid:
    N: int
    theta: np.ndarray
    f0: float = 50.0

    @property
    def dt(self) -> float:
        return 1.0 / (self.N * self.f0)


@dataclass(frozen=True, eq=False)
class VoltageTemplate:
    label: str
    samples: np.ndarray
    samples_sq: np.ndarray = field(init=False)

    def __post_init__(self):
        s = _frozen(self.samples)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "samples_sq", _frozen(s * s))

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True, eq=False)
class FourierRow:
    k: int
    cos_row: np.ndarray
    sin_row: np.ndarray


@dataclass(frozen=True)
class LevelVector:
    """Switch levels ``S`` and their conduction indicator ``S_p = |S|``."""

    S: tuple

    def __post_init__(self):
        if list(self.S) != sorted(set(self.S)):
            raise ValueError(f"levels must be strictly increasing, got {self.S}")

    @property
    def S_p(self) -> tuple:
        return tuple(abs(s) for s in self.S)

    @property
    def m(self) -> int:
        return len(self.S)

    @property
    def free_wheel(self) -> bool:
        return 0 in self.S

    def as_arrays(self):
        return np.array(self.S, dtype=float), np.array(self.S_p, dtype=float)


WITH_FREE_WHEEL = LevelVector((-1, 0, 1))
WITHOUT_FREE_WHEEL = LevelVector((-1, 1))


def levels(free_wheel: bool) -> LevelVector:
    return WITH_FREE_WHEEL if free_wheel else WITHOUT_FREE_WHEEL


def build_grid(N: int, f0: float = 50.0) -> TimeGrid:
    if int(N) != N or N < 4:
        raise BadN(f"need at least 4 samples per period, got N={N}")
    if not f0 > 0:
        raise ValueError("fundamental frequency must be positive")
    N = int(N)
    return TimeGrid(N=N, theta=_frozen(TWO_PI * np.arange(N) / N), f0=float(f0))


def build_sine_template(grid: TimeGrid, phase_offset: float = 0.0,
                        minus_offset: float | None = None, label: str = "s1") -> VoltageTemplate:
    """``sin(θ + phase_offset)``, minus ``sin(θ + minus_offset)`` when given.

    The two-offset form gives a line-to-line voltage.
    """
    samples = np.sin(grid.theta + phase_offset)
    if minus_offset is not None:
        samples = samples - np.sin(grid.theta + minus_offset)
    return VoltageTemplate(label, samples)


def single_phase_template(grid: TimeGrid) -> VoltageTemplate:
    return build_sine_template(grid, 0.0, None, "s1")


def line_templates(grid: TimeGrid) -> tuple[VoltageTemplate, VoltageTemplate, VoltageTemplate]:
    """The three line voltages ``s12, s23, s31`` of a balanced unit-amplitude supply."""
    a, b, c = PHASE_OFFSETS
    return (
        build_sine_template(grid, a, b, "s12"),
        build_sine_template(grid, b, c, "s23"),
        build_sine_template(grid, c, a, "s31"),
    )


def template_from_samples(label: str, samples, N: int | None = None) -> VoltageTemplate:
    samples = np.asarray(samples, dtype=float).reshape(-1)
    if N is not None and samples.size != N:
        raise LengthMismatch(f"template {label!r} has {samples.size} samples, expected {N}")
    if not np.all(np.isfinite(samples)):
        raise ValueError(f"template {label!r} has non-finite samples")
    return VoltageTemplate(label, samples)


def load_templates_csv(path, N: int, count: int) -> list[VoltageTemplate]:
    """Read ``count`` templates from a CSV with one row per sample.

    Single phase uses one column; three phase uses three columns in the
    order s12, s23, s31. A non-numeric first line is taken as a header.
    """
    labels = ["s1"] if count == 1 else list(LINE_PAIRS)
    rows = []
    with Path(path).open(newline="") as fh:
        for i, rec in enumerate(csv.reader(fh)):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                vals = [float(c) for c in rec]
            except ValueError:
                if i == 0 and not rows:
                    continue
                raise BadCsv(f"{path}: non-numeric value on line {i + 1}") from None
            if len(vals) != count:
                raise BadCsv(f"{path}: line {i + 1} has {len(vals)} columns, expected {count}")
            rows.append(vals)
    if len(rows) != N:
        raise BadCsv(f"{path}: expected {N} samples, found {len(rows)}")
    data = np.array(rows)
    return [template_from_samples(lab, data[:, j], N) for j, lab in enumerate(labels)]


def build_fourier_row(grid: TimeGrid, k: int) -> FourierRow:
    if k < 0 or 2 * k >= grid.N:
        raise AliasedHarmonic(f"harmonic {k} is not below N/2 = {grid.N / 2}")
    # integer product keeps the argument exact before reduction
    arg = TWO_PI * ((k * np.arange(grid.N)) % grid.N) / grid.N
    return FourierRow(k=k, cos_row=_frozen(np.cos(arg)), sin_row=_frozen(np.sin(arg)))
