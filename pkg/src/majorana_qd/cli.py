"""Command-line entry point: ``majorana-qd {simulate,spectrum,kernel}``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bath import MINUS, PLUS, correlation
from .experiments import FIGURES, figure_preset, load_config, run_scenario
from .fock import build_hamiltonian, diagonalize
from .propagator import StepTooCoarse

EXIT_OK, EXIT_USAGE, EXIT_ABORT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="majorana-qd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a scenario and write CSV files")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="INI scenario file")
    src.add_argument("--figure", choices=FIGURES, help="built-in figure preset")
    sim.add_argument("--out", default="out", help="output directory (default: ./out)")
    sim.add_argument("--workers", type=int, default=1, help="parallel processes")

    spec = sub.add_parser("spectrum", help="print energies and parity labels")
    spec.add_argument("--config", required=True)

    ker = sub.add_parser("kernel", help="dump bath correlation samples")
    ker.add_argument("--config", required=True)
    ker.add_argument("--t-max", type=float, required=True)
    ker.add_argument("--points", type=int, default=101)
    return parser


def _simulate(args) -> int:
    cfg = figure_preset(args.figure) if args.figure else load_config(args.config)
    result = run_scenario(cfg, args.out, workers=max(1, args.workers))
    for run in result.runs:
        status = f"ABORTED: {run.aborted}" if run.aborted else "ok"
        print(f"{run.path}  rows={run.rows}  {status}")
    print(f"manifest: {result.manifest}")
    return EXIT_ABORT if result.status else EXIT_OK


def _spectrum(args) -> int:
    cfg = load_config(args.config)
    for spec in cfg.runs()[:: len(cfg.betas) * len(cfg.omega_cs)]:
        sp = diagonalize(build_hamiltonian(spec.model))
        print(f"# {spec.model.species.value}")
        for j, (e, par) in enumerate(zip(sp.energies, sp.parity_labels), start=1):
            print(f"{j}  {e: .12g}  {par}")
    return EXIT_OK


def _kernel(args) -> int:
    if not args.t_max > 0 or args.points < 2:
        raise ValueError("--t-max must be positive and --points at least 2")
    cfg = load_config(args.config)
    t = np.linspace(0.0, args.t_max, args.points)
    seen = set()
    for spec in cfg.runs():
        if spec.bath in seen:
            continue
        seen.add(spec.bath)
        b = spec.bath
        print(f"# gamma={b.gamma:g} s={b.s:g} omega_c={b.omega_c:g} beta={b.beta:g}")
        print("t,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus")
        ap, am = correlation(PLUS, t, b), correlation(MINUS, t, b)
        for row in zip(t, ap.real, ap.imag, am.real, am.imag):
            print(",".join("%.12g" % v for v in row))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"simulate": _simulate, "spectrum": _spectrum, "kernel": _kernel}[args.command]
    try:
        return handler(args)
    except StepTooCoarse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
