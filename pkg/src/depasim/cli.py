"""Command-line entry point.

Subcommands:
    run        execute a preset or a YAML scenario file, emit CSV artifacts
    presets    list the packaged experiment scenarios
    gen-trace  regenerate the synthetic reference trace file

Exit codes: 0 success, 1 a run failed, 2 a --check assertion failed.
"""

import argparse
import sys

from . import scenario, workload
from .analytics import emit_csv
from .runner import run_many

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_CHECK_FAILURE = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="depas-sim",
        description="Decentralized probabilistic auto-scaling simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a YAML scenario file")
    run.add_argument("scenario", help="preset name or path to a YAML config")
    run.add_argument("--runs", type=int, default=1, help="independent seeded runs")
    run.add_argument("--seed", type=int, default=None, help="base seed (run i uses seed+i)")
    run.add_argument("--out", default="out", help="output directory for CSV artifacts")
    run.add_argument("--rate-scale", type=float, default=None,
                     help="workload rate multiplier (10 = full published scale)")
    run.add_argument("--duration", type=float, default=None,
                     help="override the simulated horizon in seconds")
    run.add_argument("--processes", type=int, default=1,
                     help="worker processes for independent runs")
    run.add_argument("--check", action="store_true",
                     help="verify accounting sanity and fail with exit code 2")

    sub.add_parser("presets", help="list packaged scenario presets")

    gen = sub.add_parser("gen-trace", help="write the synthetic reference trace")
    gen.add_argument("--out", default="townhall_trace.txt")
    return parser


def _resolve_scenario(args):
    if args.scenario in scenario.PRESET_NAMES:
        cfg = scenario.preset(
            args.scenario,
            rate_scale=args.rate_scale if args.rate_scale is not None else 1.0,
            base_seed=args.seed if args.seed is not None else 1,
        )
    else:
        cfg = scenario.parse_config(args.scenario)
        if args.rate_scale is not None:
            cfg.workload.rate_scale = args.rate_scale
        if args.seed is not None:
            cfg.base_seed = args.seed
    if args.duration is not None:
        cfg.duration = args.duration
        if cfg.warmup >= cfg.duration:
            cfg.warmup = 0.0
    return cfg.validate()


def _check(cfg, results, out):
    """Basic accounting checks after a --check run."""
    ok = True
    faulty = cfg.churn is not None or bool(cfg.disruptions)
    for result in results:
        totals = result.totals
        if totals["in_flight"] < 0:
            out("CHECK FAIL seed=%d: negative in-flight count (%d)"
                % (result.seed, totals["in_flight"]))
            ok = False
        if not faulty and totals["lost"] != 0:
            out("CHECK FAIL seed=%d: %d lost requests in a failure-free scenario"
                % (result.seed, totals["lost"]))
            ok = False
    if ok:
        out("CHECK OK: %d run(s) pass accounting checks" % len(results))
    return ok


def main(argv=None):
    args = _build_parser().parse_args(argv)

    if args.command == "presets":
        for name in scenario.PRESET_NAMES:
            print(name)
        return EXIT_OK

    if args.command == "gen-trace":
        workload.write_trace(args.out, workload.reference_points())
        print("wrote %s" % args.out)
        return EXIT_OK

    try:
        cfg = _resolve_scenario(args)
    except (scenario.ScenarioError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RUN_FAILURE

    try:
        aggr, results = run_many(
            cfg, args.runs, base_seed=args.seed, processes=args.processes
        )
    except Exception as exc:  # report the failing seed set, then fail
        print("run failed (base seed %s): %s"
              % (args.seed if args.seed is not None else cfg.base_seed, exc),
              file=sys.stderr)
        return EXIT_RUN_FAILURE

    frames_path, summary_path = emit_csv(aggr, args.out)
    s = aggr.scalars
    print("scenario=%s runs=%d" % (cfg.name, len(results)))
    if s["avg_resp_time_s"] is not None:
        print("avg_resp_time_s=%.4f rejected_pct=%.3f lost_pct=%.3f"
              % (s["avg_resp_time_s"], s["rejected_pct"], s["lost_pct"]))
    print("wrote %s and %s" % (frames_path, summary_path))

    if args.check and not _check(cfg, results, print):
        return EXIT_CHECK_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
