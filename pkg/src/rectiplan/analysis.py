"""Spectrum, THD and RL low-pass filtering of one-period waveforms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptySignal, NonpositiveParams, ZeroDesired, ZeroSignal


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided amplitude spectrum of a real period.

    ``amplitudes[k]`` is the peak amplitude of harmonic k: ``|X0|/N`` at DC,
    ``2|Xk|/N`` in between and ``|X_{N/2}|/N`` at Nyquist for even N.
    """

    amplitudes: np.ndarray
    coefficients: np.ndarray  # full complex DFT, length N

    @property
    def N(self) -> int:
        return self.coefficients.size

    def bin_energy(self) -> np.ndarray:
        """Mean-square contribution of each one-sided bin (sums to the signal's mean square)."""
        e = self.amplitudes ** 2
        e[1:] *= 0.5
        if self.N % 2 == 0:
            e[-1] = self.amplitudes[-1] ** 2
        return e


def dft_spectrum(v) -> Spectrum:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size < 2:
        raise EmptySignal(f"need at least two samples, got {v.size}")
    N = v.size
    X = np.fft.fft(v)
    amps = np.abs(X[: N // 2 + 1]) * (2.0 / N)
    amps[0] *= 0.5
    if N % 2 == 0:
        amps[-1] *= 0.5
    return Spectrum(amplitudes=amps, coefficients=X)


@dataclass(frozen=True)
class ThdReport:
    """Energy split of a waveform into desired and undesired harmonics."""

    e_total: float
    e_desired: float
    desired_bins: tuple

    @property
    def e_undesired(self) -> float:
        return max(self.e_total - self.e_desired, 0.0)

    @property
    def energy_ratio(self) -> float:
        if self.e_total == 0.0:
            return 0.0
        return min(self.e_undesired / self.e_total, 1.0)

    @property
    def conventional_ratio(self) -> float:
        if self.e_total == 0.0:
            raise ZeroSignal("conventional THD of an all-zero signal is undefined")
        if self.e_desired == 0.0:
            raise ZeroDesired("no energy in the desired bins")
        return math.sqrt(self.e_undesired / self.e_desired)

    def as_dict(self) -> dict:
        try:
            conv = self.conventional_ratio
        except (ZeroSignal, ZeroDesired):
            conv = None
        return {
            "energy_ratio": self.energy_ratio,
            "conventional_ratio": conv,
            "desired_bins": list(self.desired_bins),
            "e_total": self.e_total,
            "e_desired": self.e_desired,
        }


def thd(v, desired_bins) -> ThdReport:
    """Split mean-square energy of ``v`` between ``desired_bins`` and the rest."""
    v = np.asarray(v, dtype=float).reshape(-1)
    spec = dft_spectrum(v)
    bins = tuple(sorted({int(k) for k in desired_bins}))
    if any(k < 0 or k > v.size // 2 for k in bins):
        raise ValueError(f"desired bins must lie in [0, {v.size // 2}], got {bins}")
    e_total = float(np.mean(v * v))
    e_desired = float(spec.bin_energy()[list(bins)].sum()) if bins else 0.0
    return ThdReport(e_total=e_total, e_desired=min(e_desired, e_total), desired_bins=bins)


@dataclass(frozen=True)
class FilterConfig:
    r_ohms: float = 1.0
    l_henries: float = 0.02
    f0_hz: float = 50.0
    settle_periods: int = 10

    def __post_init__(self):
        if not (self.r_ohms > 0 and self.l_henries > 0 and self.f0_hz > 0):
            raise NonpositiveParams("R, L and f0 must all be positive")
        if int(self.settle_periods) != self.settle_periods or self.settle_periods < 1:
            raise NonpositiveParams("settle_periods must be a positive integer")

    @property
    def cutoff_hz(self) -> float:
        return self.r_ohms / (2.0 * math.pi * self.l_henries)

    def alpha(self, N: int) -> float:
        dt = 1.0 / (N * self.f0_hz)
        return math.exp(-self.r_ohms * dt / self.l_henries)


def rl_filter(v, cfg: FilterConfig = FilterConfig()) -> np.ndarray:
    """Voltage across R of a series RL driven by the periodic waveform ``v``.

    The input is held constant over each sample interval and the inductor
    current is advanced exactly. Starting from rest, ``settle_periods``
    periods are simulated and the last one is returned, sampled at the start
    of each interval.
    """
    v = np.ascontiguousarray(v, dtype=float).reshape(-1)
    if v.size == 0:
        raise EmptySignal("cannot filter an empty waveform")
    return _kernels.rl_response(v, cfg.alpha(v.size), int(cfg.settle_periods))


@dataclass(frozen=True)
class RippleStats:
    mean: float
    peak_to_peak: float
    rms_ripple: float
    dc_error: float

    def as_dict(self) -> dict:
        return {"mean": self.mean, "peak_to_peak": self.peak_to_peak,
                "rms_ripple": self.rms_ripple, "dc_error": self.dc_error}


def ripple_stats(filtered, dc_target: float = 0.0) -> RippleStats:
    f = np.asarray(filtered, dtype=float)
    if f.size == 0:
        raise EmptySignal("no samples")
    mean = float(f.mean())
    return RippleStats(
        mean=mean,
        peak_to_peak=float(f.max() - f.min()),
        rms_ripple=float(np.sqrt(np.mean((f - mean) ** 2))),
        dc_error=mean - dc_target,
    )
