"""``rmtlab`` command line.

    rmtlab <kind> --n 500 --reps 50 --dist rademacher --seed 1 --workers 2 \
        [--param k=v ...] --out results/ [--format csv|json|plot] [--force]

With ``--config FILE`` the positional argument names a section of an INI
file instead of a kind (see :mod:`rmtlab.harness.config`); flags given on
the command line override the file.

Exit status: 0 when every configured tolerance is met, 1 on a statistical
failure, 2 on a configuration or runtime error.  The default output
directory is taken from ``RMTLAB_OUT`` (falling back to ``./rmtlab-out``).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from ..errors import RmtLabError
from .config import EXPERIMENT_KINDS, ExperimentConfig, load_config, parse_param
from .experiments import run_experiment
from .report import FORMATS, emit

OUT_ENV = "RMTLAB_OUT"
DEFAULT_OUT = "rmtlab-out"

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rmtlab",
        description="Run a random-matrix experiment and check it against its reference law.",
        epilog=f"kinds: {', '.join(EXPERIMENT_KINDS)}",
    )
    p.add_argument("kind", help="experiment kind, or a section name when --config is given")
    p.add_argument("--n", type=int, help="matrix dimension")
    p.add_argument("--reps", type=int, help="number of replicates")
    p.add_argument("--dist", help="gaussian|goe|gue|rademacher|uniform|student_t:<dof>|tridiag:<beta>")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--param", action="append", default=[], metavar="K=V",
                   help="kind-specific parameter; repeatable")
    p.add_argument("--config", help="INI file with one section per experiment")
    p.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.add_argument("--format", default="json", help="csv, json or plot; comma-separate for several")
    p.add_argument("--force", action="store_true", help="overwrite existing artifacts")
    p.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    return p


def _config_from_args(args) -> ExperimentConfig:
    params = dict(parse_param(t) for t in args.param)
    core = {k: getattr(args, k) for k in ("n", "reps", "dist", "seed", "workers")}
    if args.config:
        return load_config(args.config, args.kind, {**{k: v for k, v in core.items() if v is not None}, **params})
    given = {k: v for k, v in core.items() if v is not None}
    return ExperimentConfig(kind=args.kind, params=params, **given)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    try:
        bad = [f for f in formats if f not in FORMATS]
        if bad or not formats:
            raise ValueError(f"--format must be among {', '.join(FORMATS)}, got {args.format!r}")
        config = _config_from_args(args)
        report = run_experiment(config)
        out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
        fmts = [f for f in formats if not (f == "plot" and report.series is None)]
        paths = emit(report, out, fmts, force=args.force)
    except (RmtLabError, ValueError, OSError) as exc:
        print(f"rmtlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not args.quiet:
        print("\n".join(report.summary_lines()))
        for path in paths:
            print(f"  wrote {path}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
