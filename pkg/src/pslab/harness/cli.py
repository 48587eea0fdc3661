"""Command-line entry point ``pslab``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..analysis import analytic_table
from ..constellation import build_constellation
from .config import SCENARIOS, load_config
from .output import emit_csv, write_rows
from .scenarios import run_experiment


def _list(_args=None):
    for name, desc in SCENARIOS.items():
        print(f"{name:16s} {desc}")
    return 0


def _run(args):
    cfg = load_config(args.config, seed=args.seed)
    if args.fast:
        cfg = cfg.fast()
    out = args.out or cfg.output
    if not out:
        print("error: no output path; pass --out or set 'output' in the config", file=sys.stderr)
        return 2
    result = run_experiment(cfg, threads=args.threads)
    emit_csv(result, out)
    print(f"wrote {len(result.samples)} rows to {out}")
    return 0


def _order(args):
    if args.order is not None:
        return args.order
    return 32 if args.family == "cross32" else 64


def _dump_constellation(args):
    const = build_constellation(args.family, _order(args), args.lam)
    rows = [{"re": float(p.real), "im": float(p.imag), "prior": float(q)}
            for p, q in zip(const.points, const.priors)]
    _emit(rows, args.out)
    return 0


def _dump_analytic(args):
    const = build_constellation(args.family, _order(args))
    rows = analytic_table(const, args.lambdas, 10 ** (args.snr_db / 10), args.n_large)
    _emit(rows, args.out)
    return 0


def _emit(rows, out):
    if out:
        write_rows(rows, out)
    else:
        write_rows(rows, sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pslab", description=__doc__)
    p.add_argument("--list-scenarios", action="store_true", help="print the scenarios and the plot each one produces, then exit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    r = sub.add_parser("run", help="run a scenario config and write CSV")
    r.add_argument("config")
    r.add_argument("--fast", action="store_true", help="divide symbol counts by 16")
    r.add_argument("--out", help="output CSV path (overrides config 'output')")
    r.add_argument("--seed", type=int, help="master seed (overrides PSLAB_SEED and config)")
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=_run)

    ls = sub.add_parser("list-scenarios", help="print the scenarios and the plot each one produces")
    ls.set_defaults(func=_list)

    d = sub.add_parser("dump-constellation", help="emit re, im, prior CSV")
    d.add_argument("--family", default="square", choices=["square", "cross32"])
    d.add_argument("--order", type=int, help="constellation size (default 64, or 32 for cross32)")
    d.add_argument("--lambda", dest="lam", type=float, default=0.0)
    d.add_argument("--out")
    d.set_defaults(func=_dump_constellation)

    a = sub.add_parser("dump-analytic", help="emit closed-form MSE and lambda_max residual CSV")
    a.add_argument("--family", default="square", choices=["square", "cross32"])
    a.add_argument("--order", type=int, help="constellation size (default 64, or 32 for cross32)")
    a.add_argument("--snr-db", type=float, default=30.0)
    a.add_argument("--n-large", type=int, default=100)
    a.add_argument("--lambdas", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.03, 0.04, 0.05])
    a.add_argument("--out")
    a.set_defaults(func=_dump_analytic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.list_scenarios:
        return _list()
    if not args.command:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
