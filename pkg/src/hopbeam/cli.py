"""Command line interface: `hopbeam plan` and `hopbeam sweep`."""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import report
from .pipeline import SCHEMES, RunOptions, SweepSpec, run_pipeline, run_sweep
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_LOAD_ERROR = 2
EXIT_POINT_FAILURE = 3


def _parse_bits(text: str) -> int | None:
    if text.lower() in ("cont", "continuous", "inf"):
        return None
    bits = int(text)
    if bits < 1:
        raise argparse.ArgumentTypeError("bits must be >= 1 or 'cont'")
    return bits


def _parse_values(text: str) -> list[float]:
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok.lower() in ("cont", "continuous", "inf"):
            values.append(math.inf)
        else:
            values.append(float(tok))
    return values


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("scenario", help="scenario JSON file")
    parser.add_argument("--bits", type=_parse_bits, default=None,
                        help="RIS phase quantization bits, or 'cont' (default)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario RNG seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--hop-cap", type=int, default=None,
                        help="maximum number of RIS reflections per path")
    parser.add_argument("--rotation-scan", type=int, default=0,
                        help="scan this many common-phase offsets when quantizing")
    parser.add_argument("--bisect-tol", type=float, default=1e-4)
    parser.add_argument("--rate-tol", type=float, default=1e-5)
    parser.add_argument("--max-outer", type=int, default=20)


def _options(args) -> RunOptions:
    return RunOptions(bits=args.bits, seed=args.seed, hop_cap=args.hop_cap,
                      rotation_scan=args.rotation_scan,
                      bisect_tol=args.bisect_tol, rate_tol=args.rate_tol,
                      max_outer=args.max_outer)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopbeam",
        description="Multi-hop multi-RIS downlink planning and sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="run one scheme on one scenario")
    _add_common(plan)
    plan.add_argument("--scheme", choices=SCHEMES, default="multi")

    sweep = sub.add_parser("sweep", help="sweep a system variable")
    _add_common(sweep)
    sweep.add_argument("--var", required=True,
                       choices=("tx_power_dB", "elements_per_ris",
                                "bs_antennas", "quantization_bits"))
    sweep.add_argument("--values", required=True, type=_parse_values,
                       help="comma-separated values ('cont' allowed for bits)")
    sweep.add_argument("--schemes", default="multi",
                       help="comma-separated subset of "
                            f"{{{','.join(SCHEMES)}}}")
    return parser


def cmd_plan(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.replaced(rng_seed=args.seed)
    result = run_pipeline(scenario, args.scheme, _options(args))

    os.makedirs(args.out, exist_ok=True)
    row = report.result_to_row(result)
    with open(os.path.join(args.out, "results.csv"), "w") as fh:
        fh.write(report.rows_to_csv([row]))
    report.dump_json(report.paths_document(result),
                     os.path.join(args.out, "paths.json"))
    report.dump_json(report.groups_document(result),
                     os.path.join(args.out, "groups.json"))
    report.dump_json(report.schedule_document(result),
                     os.path.join(args.out, "schedule.json"))
    print(f"scheme={result.scheme} groups={result.cover.count} "
          f"min_rate={result.objective:.6f} bits "
          f"(outer={result.report.counters.outer_iterations}, "
          f"probes={result.report.counters.bisection_probes}, "
          f"fixed_point={result.report.counters.fixed_point_iterations}, "
          f"wall={result.wall_ms:.1f} ms)", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.replaced(rng_seed=args.seed)
    spec = SweepSpec(args.var, args.values,
                     [s.strip() for s in args.schemes.split(",") if s.strip()])
    rows = run_sweep(scenario, spec, _options(args))

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "results.csv"), "w") as fh:
        fh.write(report.rows_to_csv(rows))
    failures = [r for r in rows if r.error]
    for r in failures:
        print(f"point failed: scheme={r.scheme} {r.variable}={r.value}: "
              f"{r.error}", file=sys.stderr)
    print(f"{len(rows)} rows written to "
          f"{os.path.join(args.out, 'results.csv')}", file=sys.stderr)
    return EXIT_POINT_FAILURE if failures else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return cmd_plan(args)
        return cmd_sweep(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_LOAD_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POINT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
