"""End-to-end runs behind the CLI: design, analyze and oracle."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import FilterConfig, dft_spectrum, ripple_stats, rl_filter, thd
from .config import RunConfig
from .errors import BadCsv, InfeasibleProblem
from .lp import LinearProgram, LpStatus, solve_lp
from .oracle import enumerate_single, enumerate_three
from .quantizer import quantize_single, quantize_three, residual_report
from .single_phase import input_current_single, output_voltage_single, solve_single_phase
from .three_phase import output_voltage_three, phase_currents, solve_three_phase

log = logging.getLogger(__name__)

DOMINANCE_TOL = 1e-9


def fmt(v) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path: Path, doc):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def read_waveform_csv(path) -> np.ndarray:
    """Samples from a CSV: the ``v`` column if a header names one, else the last column."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            records = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise BadCsv(f"cannot read {path}: {exc.strerror}") from exc
    if not records:
        raise BadCsv(f"{path}: no samples")
    col = -1
    try:
        float(records[0][-1])
    except ValueError:
        header = [c.strip() for c in records.pop(0)]
        col = header.index("v") if "v" in header else len(header) - 1
    try:
        samples = np.array([float(r[col]) for r in records])
    except (ValueError, IndexError) as exc:
        raise BadCsv(f"{path}: {exc}") from exc
    if samples.size < 2:
        raise BadCsv(f"{path}: need at least two samples, found {samples.size}")
    if not np.all(np.isfinite(samples)):
        raise BadCsv(f"{path}: non-finite sample")
    return samples


def _thd_entry(v, bins):
    return thd(v, bins).as_dict()


def _subprogram(lp: LinearProgram, keep_eq, keep_ub=(), cost=None) -> LinearProgram:
    eq = [i for i, lab in enumerate(lp.eq_labels) if keep_eq(lab)]
    ub = [i for i, lab in enumerate(lp.ineq_labels) if lab in keep_ub]
    return LinearProgram(
        cost=np.zeros(lp.num_vars) if cost is None else cost,
        eq_matrix=lp.eq_matrix[eq] if eq else None, eq_rhs=lp.eq_rhs[eq] if eq else None,
        ineq_matrix=lp.ineq_matrix[ub] if ub else None, ineq_rhs=lp.ineq_rhs[ub] if ub else None,
        eq_labels=tuple(lp.eq_labels[i] for i in eq), ineq_labels=tuple(lp.ineq_labels[i] for i in ub),
    )


GROUPS = {
    "dc": lambda lab: lab == "dc",
    "current_mean": lambda lab: lab.startswith("current_mean"),
    "current_harmonics": lambda lab: lab.startswith("current") and not lab.startswith("current_mean"),
    "voltage_harmonics": lambda lab: lab.startswith("voltage"),
}


def diagnose_infeasible(lp: LinearProgram) -> dict:
    """Which constraint groups are infeasible on their own, and the reachable DC range."""
    base = lambda lab: lab.startswith("rowsum")  # noqa: E731
    physical = lambda lab: base(lab) or lab.startswith("current_mean[")  # noqa: E731
    present = {g for g, sel in GROUPS.items() if any(sel(lab) for lab in lp.eq_labels)}
    if lp.ineq_labels:
        present.add("dc")
    alone = []
    for g in sorted(present):
        sel = GROUPS[g]
        sub = _subprogram(lp, lambda lab, sel=sel: base(lab) or sel(lab),
                          keep_ub=lp.ineq_labels if g == "dc" else ())
        if solve_lp(sub).status is LpStatus.INFEASIBLE:
            alone.append(g)
    dc_row = None
    if "dc" in lp.eq_labels:
        dc_row = lp.eq_matrix[lp.eq_labels.index("dc")]
    elif "dc_hi" in lp.ineq_labels:
        dc_row = lp.ineq_matrix[lp.ineq_labels.index("dc_hi")]
    dc_range = None
    if dc_row is not None:
        lo = solve_lp(_subprogram(lp, physical, cost=dc_row))
        hi = solve_lp(_subprogram(lp, physical, cost=-dc_row))
        if lo.optimal and hi.optimal:
            dc_range = [lo.objective, -hi.objective]
    return {
        "infeasible_alone": alone,
        "explanation": (f"constraint group(s) {', '.join(alone)} cannot be met even on their own"
                        if alone else "each group is feasible alone; their combination is not"),
        "dc_range": dc_range,
    }


@dataclass
class DesignOutcome:
    status: str
    exit_code: int
    report: dict


def run_design(cfg: RunConfig) -> DesignOutcome:
    """Solve, quantize, analyze and write every output file for one config."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid()
    spec = cfg.spec()
    templates = cfg.templates(grid)
    three = cfg.phase == "three"
    base = {"phase": cfg.phase, "N": grid.N, "spec": spec.to_dict(), "spec_hash": spec.digest()}
    try:
        relaxed = (solve_three_phase(spec, grid, templates) if three
                   else solve_single_phase(spec, grid, templates[0]))
    except InfeasibleProblem as exc:
        report = {**base, "status": "infeasible", "diagnosis": diagnose_infeasible(exc.lp)}
        write_json(out / "report.json", report)
        log.info("infeasible: %s", report["diagnosis"]["explanation"])
        return DesignOutcome("infeasible", 2, report)

    relaxed_res = residual_report(relaxed, spec, grid, templates)
    if three:
        q = quantize_three(relaxed) if cfg.quantize else None
        scheme = q if q is not None else relaxed
        currents = phase_currents(scheme.Z, cfg.load_current, literal=spec.literal_currents)
        voltage = output_voltage_three(scheme.Z, templates)
    else:
        q = quantize_single(relaxed, spec.levels) if cfg.quantize else None
        x = q.x if q is not None else relaxed.x
        currents = (input_current_single(x, cfg.load_current),)
        voltage = output_voltage_single(x, templates[0])
    quant_res = residual_report(q, spec, grid, templates) if q is not None else None

    spectrum = dft_spectrum(voltage)
    filtered = rl_filter(voltage, cfg.filter)
    target = spec.dc_target if spec.dc_interval is None else 0.5 * sum(spec.dc_interval)
    ripple = ripple_stats(filtered, target)

    idx = np.arange(grid.N)
    if q is not None:
        write_csv(out / "scheme.csv", ["index", "theta", "state"],
                  ([i, fmt(t), s] for i, t, s in zip(idx, grid.theta, q.tokens)))
    elif three:
        write_csv(out / "scheme.csv", ["index", "theta", "x1", "x2", "x3"],
                  ([i, fmt(t), *(fmt(c) for c in relaxed.x[:, i])] for i, t in zip(idx, grid.theta)))
    else:
        write_csv(out / "scheme.csv", ["index", "theta", "state"],
                  ([i, fmt(t), fmt(s)] for i, t, s in zip(idx, grid.theta, relaxed.x)))
    write_csv(out / "voltage.csv", ["index", "theta", "v"],
              ([i, fmt(t), fmt(v)] for i, t, v in zip(idx, grid.theta, voltage)))
    write_csv(out / "spectrum.csv", ["k", "amplitude"],
              ([k, fmt(a)] for k, a in enumerate(spectrum.amplitudes)))
    write_csv(out / "filtered.csv", ["index", "t_seconds", "v"],
              ([i, fmt(i * grid.dt), fmt(v)] for i, v in zip(idx, filtered)))

    current_thd = [_thd_entry(c, [1]) for c in currents]
    report = {
        **base,
        "status": "optimal",
        "objective": relaxed.objective,
        "quantized": q is not None,
        "dc": {"relaxed": relaxed_res.dc_achieved,
               "quantized": quant_res.dc_achieved if quant_res else None},
        "residuals": {"relaxed": relaxed_res.as_dict(),
                      "quantized": quant_res.as_dict() if quant_res else None},
        "thd": {
            "input_current": current_thd[0] if len(current_thd) == 1 else current_thd,
            "output_voltage": _thd_entry(voltage, [0]),
        },
        "ripple": ripple.as_dict(),
        "filter": {"r_ohms": cfg.filter.r_ohms, "l_henries": cfg.filter.l_henries,
                   "f0_hz": cfg.filter.f0_hz, "settle_periods": cfg.filter.settle_periods,
                   "cutoff_hz": cfg.filter.cutoff_hz},
        "load_current": cfg.load_current,
        "spectrum": [float(a) for a in spectrum.amplitudes],
    }
    write_json(out / "report.json", report)
    return DesignOutcome("optimal", 0, report)


def run_analyze(wave_csv, desired, out_dir, filter_cfg: FilterConfig | None = None,
                dc_target: float | None = None) -> dict:
    v = read_waveform_csv(wave_csv)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spectrum = dft_spectrum(v)
    write_csv(out / "spectrum.csv", ["k", "amplitude"],
              ([k, fmt(a)] for k, a in enumerate(spectrum.amplitudes)))
    doc = {"N": int(v.size), **thd(v, desired).as_dict()}
    if filter_cfg is not None:
        filtered = rl_filter(v, filter_cfg)
        dt = 1.0 / (v.size * filter_cfg.f0_hz)
        write_csv(out / "filtered.csv", ["index", "t_seconds", "v"],
                  ([i, fmt(i * dt), fmt(y)] for i, y in enumerate(filtered)))
        doc["ripple"] = ripple_stats(filtered, dc_target if dc_target is not None else 0.0).as_dict()
    write_json(out / "thd.json", doc)
    return doc


def run_oracle(cfg: RunConfig, tolerance: float) -> dict:
    grid = cfg.grid()
    spec = cfg.spec()
    templates = cfg.templates(grid)
    if cfg.phase == "three":
        result = enumerate_three(spec, grid, tolerance, templates)
        solve = lambda: solve_three_phase(spec, grid, templates)  # noqa: E731
    else:
        result = enumerate_single(spec, grid, tolerance, templates[0])
        solve = lambda: solve_single_phase(spec, grid, templates[0])  # noqa: E731
    try:
        lp_opt, lp_status = solve().objective, "optimal"
    except InfeasibleProblem:
        lp_opt, lp_status = None, "infeasible"
    if result.num_feasible == 0:
        dominance = True
    else:
        dominance = lp_opt is not None and lp_opt <= result.best_cost + DOMINANCE_TOL
    doc = {**result.as_dict(), "tolerance": tolerance, "lp_status": lp_status,
           "lp_optimum": lp_opt, "dominance": dominance, "spec": spec.to_dict()}
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "oracle.json", doc)
    return doc
