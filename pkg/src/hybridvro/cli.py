"""Command-line entry point.

    hybridvro vro          --config run.cfg --out results/
    hybridvro sweep-strain --config run.cfg --values 4.4,6.0,7.6
    hybridvro sweep-field  --config run.cfg --values 0,1.3,2.6
    hybridvro spectrum     --config run.cfg --nu-min -40 --nu-max 40 --points 4001
    hybridvro selftest

Exit codes: 0 ok, 1 selftest failure, 2 usage, 3 config, 4 dynamics, 5 analysis.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, dynamics, experiments, validation
from .config import ConfigError, load_config

EXIT_SELFTEST = 1
EXIT_CONFIG = 3
EXIT_DYNAMICS = 4
EXIT_ANALYSIS = 5


def _values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridvro", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides config 'output')")
        p.add_argument("--threads", type=int, default=1)

    common(sub.add_parser("vro", help="disorder-averaged vacuum Rabi oscillation"))
    for name, help_ in (("sweep-strain", "VRO for several strain widths"), ("sweep-field", "VRO for several field magnitudes")):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--values", required=True, type=_values)
    p = sub.add_parser("spectrum", help="qubit response of one sampled realization")
    common(p)
    p.add_argument("--nu-min", type=float, default=-40.0)
    p.add_argument("--nu-max", type=float, default=40.0)
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--realization", type=int, default=0)
    p = sub.add_parser("selftest", help="oracle-equivalence and norm-conservation checks")
    p.add_argument("--systems", type=int, default=50)
    return parser


def _out_dir(args, config) -> Path:
    return args.out if args.out is not None else Path(config.output)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "selftest":
        results = [validation.check_oracle_equivalence(args.systems), validation.check_norm_conservation()]
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else EXIT_SELFTEST

    try:
        config = load_config(args.config)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        out = _out_dir(args, config)
        if args.command == "vro":
            traj = experiments.run_vro(config, args.threads)
            path = experiments.write_text(out / "vro.csv", experiments.vro_csv(traj, config))
            print(path)
        elif args.command in ("sweep-strain", "sweep-field"):
            key, prefix = ("e_fwhm", "strain") if args.command == "sweep-strain" else ("b_ext_mt", "field")
            paths, spread = experiments.write_sweep(config, key, args.values, out, prefix, args.threads)
            for p in paths:
                print(p)
            print(f"trace_spread = {spread:.6g}")
        elif args.command == "spectrum":
            trace = experiments.run_spectrum(config, args.nu_min, args.nu_max, args.points, args.realization)
            path = experiments.write_text(out / "spectrum.csv", experiments.spectrum_csv(trace, config))
            print(path)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (dynamics.StepTooLarge, dynamics.IllConditioned, dynamics.GridMismatch, np.linalg.LinAlgError) as exc:
        print(f"dynamics error: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS
    except (analysis.NoOscillation, analysis.BadFit) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
