"""Command line entry point: ``rectiplan design|analyze|oracle|preset``.

Exit codes: 0 success, 1 error, 2 infeasible design.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .analysis import FilterConfig
from .config import OUT_ENV, load_config, preset
from .errors import RectiplanError
from .pipeline import run_analyze, run_design, run_oracle

log = logging.getLogger("rectiplan")


def cmd_design(args) -> int:
    cfg = load_config(args.config)
    outcome = run_design(cfg)
    if outcome.status == "optimal":
        print(f"optimal: objective {outcome.report['objective']:.6g}, outputs in {cfg.output_dir}")
    else:
        print(f"infeasible: {outcome.report['diagnosis']['explanation']} (see {cfg.output_dir}/report.json)")
    return outcome.exit_code


def cmd_analyze(args) -> int:
    filter_cfg = None
    if args.filter:
        filter_cfg = FilterConfig(r_ohms=args.r, l_henries=args.l, f0_hz=args.f0,
                                  settle_periods=args.settle)
    out = os.environ.get(OUT_ENV) or args.out
    doc = run_analyze(args.wave, args.desired, out, filter_cfg, args.dc_target)
    print(f"energy_ratio {doc['energy_ratio']:.6g}, outputs in {out}")
    return 0


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    doc = run_oracle(cfg, args.tol)
    print(f"oracle best {doc['best_cost']}, lp {doc['lp_optimum']}, "
          f"{doc['num_feasible']}/{doc['num_enumerated']} feasible, dominance {doc['dominance']}")
    return 0 if doc["dominance"] else 1


def cmd_preset(args) -> int:
    text = json.dumps(preset(args.name), indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rectiplan", description="LP switching design for controlled rectifiers")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="solve, quantize and analyze one configuration")
    d.add_argument("config")
    d.set_defaults(func=cmd_design)

    a = sub.add_parser("analyze", help="spectrum, THD and optional RL filtering of a waveform CSV")
    a.add_argument("wave")
    a.add_argument("--desired", type=int, nargs="+", default=[1], help="harmonic bins counted as wanted")
    a.add_argument("--filter", action="store_true", help="also write the RL-filtered waveform")
    a.add_argument("--r", type=float, default=1.0, help="filter resistance, ohms")
    a.add_argument("--l", type=float, default=0.02, help="filter inductance, henries")
    a.add_argument("--f0", type=float, default=50.0, help="fundamental frequency, Hz")
    a.add_argument("--settle", type=int, default=10, help="periods simulated before the one reported")
    a.add_argument("--dc-target", type=float, default=None)
    a.add_argument("--out", default=".")
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("oracle", help="brute-force the discrete problem and compare with the LP")
    o.add_argument("config")
    o.add_argument("--tol", type=float, default=0.02)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("preset", help="print a configuration reproducing one of the reference scenarios")
    s.add_argument("name", choices=["fig5", "fig6", "fig7", "fig8"])
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_preset)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except RectiplanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
