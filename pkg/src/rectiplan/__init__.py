"""Optimal switching schemes for fully controlled rectifiers via linear programming."""

from ._kernels import BACKEND
from .analysis import FilterConfig, dft_spectrum, ripple_stats, rl_filter, thd
from .discretization import build_fourier_row, build_grid, build_sine_template, line_templates, levels
from .lp import LinearProgram, LpSolution, LpStatus, check_point, solve_lp
from .oracle import enumerate_single, enumerate_three
from .quantizer import QuantizedScheme, quantize_single, quantize_three, residual_report
from .single_phase import (SinglePhaseSpec, build_single_phase_lp, input_current_single,
                           output_voltage_single, solve_single_phase)
from .three_phase import (LegState, ThreePhaseSpec, build_three_phase_lp, output_voltage_three,
                          phase_currents, solve_three_phase)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "FilterConfig", "dft_spectrum", "ripple_stats", "rl_filter", "thd",
    "build_fourier_row", "build_grid", "build_sine_template", "line_templates", "levels",
    "LinearProgram", "LpSolution", "LpStatus", "check_point", "solve_lp",
    "enumerate_single", "enumerate_three",
    "QuantizedScheme", "quantize_single", "quantize_three", "residual_report",
    "SinglePhaseSpec", "build_single_phase_lp", "input_current_single", "output_voltage_single",
    "solve_single_phase", "LegState", "ThreePhaseSpec", "build_three_phase_lp",
    "output_voltage_three", "phase_currents", "solve_three_phase",
]
