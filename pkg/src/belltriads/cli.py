"""Command-line front end.

Subcommands: ``sweep`` (probability versus noise), ``probability`` (one
estimate), ``integral`` (analytic violation-probability integral),
``bound`` (closed-form non-violation bound), ``threshold`` (critical
visibility), and ``verify`` (oracle / region consistency suites).
Results are emitted as CSV (default) or JSON for external plotting; all
stochastic output is fully determined by ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .bipartite import nonviolation_bound, violation_probability_integral
from .correlations import NoiseLevel
from .experiments import (SweepConfig, SweepRow, default_samples, estimate_probability,
                          gamma_sweep, oracle_crosscheck, region_crosscheck)
from .mabk import tsirelson_threshold

CSV_HEADER = "gamma,n_parties,samples,violations,p_hat,std_error"


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _emit_rows(rows: list[SweepRow], out_path: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps([asdict(r) for r in rows], indent=2) + "\n"
    else:
        lines = [CSV_HEADER]
        for r in rows:
            lines.append(",".join(_fmt(v) for v in (r.gamma, r.n_parties, r.samples,
                                                    r.violations, r.p_hat, r.std_error)))
        text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _row_from_estimate(est, gamma: float, n: int) -> SweepRow:
    return SweepRow(gamma=gamma, n_parties=n, samples=est.samples,
                    violations=est.violations, p_hat=est.p_hat,
                    std_error=est.std_error)


def _cmd_sweep(args) -> int:
    config = SweepConfig(n_parties=args.n, gamma_min=args.gamma_min,
                         gamma_max=args.gamma_max, steps=args.steps,
                         samples_per_point=args.samples or default_samples(args.n),
                         seed=args.seed, state=args.state)
    _emit_rows(gamma_sweep(config), args.out, args.format)
    return 0


def _cmd_probability(args) -> int:
    est = estimate_probability(args.n, NoiseLevel(args.gamma),
                               args.samples or default_samples(args.n), args.seed,
                               state=args.state)
    _emit_rows([_row_from_estimate(est, args.gamma, args.n)], args.out, args.format)
    return 0


def _cmd_integral(args) -> int:
    value = violation_probability_integral(NoiseLevel(args.gamma), args.resolution)
    print(f"{value:.12g}")
    return 0


def _cmd_bound(args) -> int:
    print(f"{nonviolation_bound(NoiseLevel(args.gamma)):.2e}")
    return 0


def _cmd_threshold(args) -> int:
    print(f"{tsirelson_threshold(args.n):.12g}")
    return 0


def _cmd_verify(args) -> int:
    if args.suite == "oracle":
        report = oracle_crosscheck(args.n, args.trials, args.tol, args.seed)
        print(f"oracle suite: n={report.n} trials={report.trials} "
              f"comparisons={report.comparisons} "
              f"max_discrepancy={report.max_discrepancy:.3e} "
              f"tolerance={report.tolerance:.1e} "
              f"{'PASS' if report.passed else 'FAIL'}")
    else:
        report = region_crosscheck(args.samples or 10000, NoiseLevel(args.gamma),
                                   args.seed)
        print(f"region suite: samples={report.samples} gamma={report.gamma} "
              f"counterexamples={report.counterexamples} "
              f"region_rate={report.region_rate:.6f} "
              f"search_rate={report.search_rate:.6f} "
              f"{'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belltriads",
        description="Bell-inequality violations from random measurement triads")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sweep", help="violation probability over a noise range")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma-min", type=float, required=True)
    p.add_argument("--gamma-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", choices=("singlet", "ghz"), default=None)
    add_output_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("probability", help="one violation-probability estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state", choices=("singlet", "ghz"), default=None)
    add_output_flags(p)
    p.set_defaults(func=_cmd_probability)

    p = sub.add_parser("integral", help="analytic violation-probability integral (n=2)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--resolution", type=int, default=256)
    p.set_defaults(func=_cmd_integral)

    p = sub.add_parser("bound", help="closed-form non-violation bound (n=2)")
    p.add_argument("--gamma", type=float, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("threshold", help="critical visibility for n parties")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("verify", help="consistency suites")
    p.add_argument("--suite", choices=("oracle", "region"), required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--gamma", type=float, default=0.98)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    return parser


def run_cli(argv: list[str]) -> int:
    """Parse and run; exit status 0 on success, 2 on argument errors, 1 on
    runtime failures."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
