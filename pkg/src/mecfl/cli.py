"""Command-line interface: run one scenario, sweep a knob, or verify oracles."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import io
from .verify import run_all


def _add_common_flags(parser):
    parser.add_argument("--config", help="experiment config file (flat key = value)")
    parser.add_argument("--seed", type=int, help="override the experiment seed")
    parser.add_argument("--users", type=int, help="override the user count")
    parser.add_argument("--max-iter", type=int, help="override the iteration cap")
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--scenario", help="scenario to run")


def _build_spec(args, default_scenario: str) -> io.ExperimentSpec:
    spec = io.load_config(args.config) if args.config else io.ExperimentSpec()
    overrides = {}
    if args.scenario:
        overrides["scenario"] = args.scenario
    elif args.config is None:
        overrides["scenario"] = default_scenario
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.users is not None:
        overrides["user_count"] = args.users
    if args.max_iter is not None:
        overrides["max_iterations"] = args.max_iter
    if args.out is not None:
        overrides["output_path"] = args.out
    return replace(spec, **overrides) if overrides else spec


def _cmd_run(args) -> int:
    spec = _build_spec(args, "proposed")
    result = io.run_experiment(spec)
    if spec.output_path:
        io.write_metrics_csv(spec.output_path, result)
    if args.trace:
        io.write_alloc_trace(args.trace, result)
    last = result.trace[-1]
    status = "converged" if result.converged else "not converged"
    print(f"{spec.scenario}: {status} after {result.iterations_used} iterations")
    print(f"  test loss {last.test_loss:.6f}  round time {last.t_total:.6f} s  "
          f"weighted score {last.weighted_score:.6f}")
    if spec.output_path:
        print(f"  metrics written to {spec.output_path}")
    return 0


def _cmd_sweep(args) -> int:
    spec = _build_spec(args, "sweep_offload")
    rows = io.run_sweep(spec)
    if spec.output_path:
        io.write_sweep_csv(spec.output_path, rows)
        print(f"{spec.scenario}: {len(rows)} rows written to {spec.output_path}")
    else:
        for row in rows:
            print(f"  value {row['value']:.2f}  test loss {row['test_loss']:.6f}  "
                  f"round time {row['t_total']:.6f} s")
    return 0


def _cmd_verify(args) -> int:
    results = run_all(fast=args.fast)
    failures = 0
    for check in results:
        flag = "PASS" if check.passed else "FAIL"
        print(f"[{flag}] {check.name}: {check.detail}")
        failures += 0 if check.passed else 1
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mecfl",
        description="Simulator of edge-assisted federated learning with "
                    "energy-aware resource management.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one scenario")
    _add_common_flags(run_parser)
    run_parser.add_argument("--trace", help="JSON-lines allocation trace path")
    run_parser.set_defaults(handler=_cmd_run)

    sweep_parser = sub.add_parser("sweep", help="sweep the offload or CPU fraction")
    _add_common_flags(sweep_parser)
    sweep_parser.set_defaults(handler=_cmd_sweep)

    verify_parser = sub.add_parser("verify", help="check closed forms against oracles")
    verify_parser.add_argument("--fast", action="store_true",
                               help="run a tenth of the usual instance counts")
    verify_parser.set_defaults(handler=_cmd_verify)

    args = parser.parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
