"""Command line front end.

Subcommands:
  run        execute a JSON run configuration
  figure1    emit the four-panel location-model comparison data
  verify-all run the bundled full verification grid

The SDKL_OUT environment variable overrides the output directory for every
subcommand; an explicit --out beats both.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import runner
from .errors import ConfigError
from .quadrature import QuadSpec


def _resolve_out(cli_out: Optional[str], default: str) -> str:
    if cli_out:
        return cli_out
    return os.environ.get("SDKL_OUT") or default


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdkl",
        description="score-driven update verification lab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON run configuration")
    p_run.add_argument("config", help="path to the config JSON file")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--seed", type=int, help="master seed override")
    p_run.add_argument("--jobs", type=int, help="parallelism degree")

    p_fig = sub.add_parser("figure1",
                           help="emit the location-model panel data")
    p_fig.add_argument("--alpha", type=float, default=0.1,
                       help="learning rate (default 0.1)")
    p_fig.add_argument("--delta", type=float, default=0.1,
                       help="localization radius (default 0.1)")
    p_fig.add_argument("--y", type=float, default=-1.0,
                       help="observation y_t (default -1)")
    p_fig.add_argument("--theta-pred", type=float, default=0.0,
                       help="predicted parameter (default 0)")
    p_fig.add_argument("--lams", type=float, nargs="+",
                       default=[0.0, 1.0, -1.0, -1.5],
                       help="truth locations, one panel each")
    p_fig.add_argument("--out", help="output directory")
    p_fig.add_argument("--plot", action="store_true",
                       help="also render PNG panels next to the CSV data")

    p_all = sub.add_parser("verify-all",
                           help="run the bundled full verification grid")
    p_all.add_argument("--out", help="output directory")
    p_all.add_argument("--seed", type=int, default=42,
                       help="master seed (default 42)")
    p_all.add_argument("--jobs", type=int, default=1,
                       help="parallelism degree (default 1)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = runner.RunConfig.from_path(args.config)
            out = _resolve_out(args.out, cfg.out_dir)
            return runner.run_config(cfg, out_dir=out, seed=args.seed,
                                     jobs=args.jobs)
        if args.command == "figure1":
            out = _resolve_out(args.out, "out")
            paths = runner.emit_figure1(out, alpha=args.alpha, y_t=args.y,
                                        theta_pred=args.theta_pred,
                                        radius=args.delta, lams=args.lams,
                                        quad=QuadSpec())
            if args.plot:
                from . import plotting
                paths += plotting.render_figure1(out, alpha=args.alpha,
                                                 y_t=args.y,
                                                 theta_pred=args.theta_pred,
                                                 lams=args.lams)
            for p in paths:
                print(p)
            return 0
        if args.command == "verify-all":
            out = _resolve_out(args.out, "out")
            cfg = runner.default_verify_config(seed=args.seed,
                                               jobs=args.jobs,
                                               out_dir=out)
            return runner.run_config(cfg)
    except ConfigError as exc:
        print(f"sdkl: config error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
