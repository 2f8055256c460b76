"""Command-line entry points: run, report, verify."""
from __future__ import annotations

import argparse
import json
import sys

from .pipeline import SimulationConfig, report_resources, run, verify_encodings


def _load_config(args) -> SimulationConfig:
    path = args.config or args.config_flag
    if path is None:
        raise SystemExit("a config file is required (positional or --config)")
    config = SimulationConfig.from_json(path)
    if args.out is not None:
        config.out_dir = args.out
    if args.epsilon is not None:
        config.epsilon = args.epsilon
    if getattr(args, "workers", None):
        config.workers = args.workers
    config.seedless = True  # the pipeline carries no randomness at all
    return config


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="springq",
        description="Quantum-circuit simulation of coupled spring-mass chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a config and emit trajectory artifacts")
    p_run.add_argument("config", nargs="?", default=None)
    p_run.add_argument("--config", dest="config_flag", default=None, help="config file path")
    p_run.add_argument("--out", default=None, help="output directory (overrides config)")
    p_run.add_argument("--epsilon", type=float, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--report-only", action="store_true", help="resource report, no simulation")
    p_run.add_argument("--seedless", action="store_true", default=True,
                       help="assert a seed-free deterministic run (always on)")

    p_rep = sub.add_parser("report", help="resource accounting without simulation")
    p_rep.add_argument("config", nargs="?", default=None)
    p_rep.add_argument("--config", dest="config_flag", default=None, help="config file path")
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--epsilon", type=float, default=None)

    p_ver = sub.add_parser("verify", help="run the block-encoding exactness suite")
    p_ver.add_argument("--tol", type=float, default=1e-9)

    args = parser.parse_args(argv)

    if args.command == "verify":
        rows = verify_encodings(tol=args.tol)
        failed = 0
        for name, dev, ok in rows:
            print(f"{'PASS' if ok else 'FAIL'}  {name:32s} deviation={dev:.3e}")
            failed += 0 if ok else 1
        print(f"{len(rows) - failed}/{len(rows)} encodings within {args.tol:g}")
        return 1 if failed else 0

    config = _load_config(args)
    if args.command == "report" or getattr(args, "report_only", False):
        report = report_resources(config)
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
        if config.out_dir:
            import os

            os.makedirs(config.out_dir, exist_ok=True)
            with open(os.path.join(config.out_dir, "resources.json"), "w") as f:
                f.write(text + "\n")
        print(text)
        return 0

    result = run(config)
    worst_v = float(result.trajectory.rel_err_v.max())
    worst_x = float(result.trajectory.rel_err_x.max())
    print(f"steps={len(result.trajectory.times)} "
          f"max log10 rel err: velocity={worst_v:.2f} displacement={worst_x:.2f}")
    if result.out_dir:
        print(f"artifacts written to {result.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
