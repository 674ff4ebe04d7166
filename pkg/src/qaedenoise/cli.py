"""Command-line front end.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
gradient check fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, RunConfig, SweepConfig, parse_config, parse_sweep_config
from .plot import emit_plot


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qaedenoise", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train one network and write its metric CSV")
    _common(p)
    p.add_argument("--dump-data", action="store_true", help="also write the generated data sets")

    p = sub.add_parser("sweep", help="final metrics as a function of the noise probability")
    _common(p)

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", nargs="?", help="preset name (omit to list)")
    _common(p, config=False)

    p = sub.add_parser("gradient-check", help="compare parameter-shift and finite-difference gradients")
    _common(p)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--pairs", type=int, default=5, help="training pairs in the check data set")

    p = sub.add_parser("plot", help="render CSV columns as an SVG line chart")
    p.add_argument("csv")
    p.add_argument("--columns", required=True, help="comma-separated column names")
    p.add_argument("--out", required=True, help="output .svg path")
    return ap


def _load_run(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.out is not None:
        cfg = cfg.replace(out_dir=args.out)
    return cfg


def _load_sweep(args) -> SweepConfig:
    sw = parse_sweep_config(args.config) if args.config else SweepConfig(RunConfig())
    base = sw.base
    if args.seed is not None:
        base = base.replace(seed=args.seed)
    if args.out is not None:
        base = base.replace(out_dir=args.out)
    return SweepConfig(base, sw.p_values, sw.iterations_at_eval)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "train":
            cfg = _load_run(args)
            print(experiments.describe_arch(experiments.arch_for(cfg)))
            res = experiments.cmd_train(cfg, dump_data=args.dump_data)
            fin = res.final
            print(
                f"final: cost {fin.cost_train:.4f}  train(clean) {fin.fid_train_clean:.4f}  "
                f"val {fin.fid_val:.4f}  renyi hidden {fin.renyi_hidden:.4f} output {fin.renyi_output:.4f}"
            )
            print(f"wrote {Path(cfg.out_dir) / experiments.run_tag(cfg)}.csv")
        elif args.command == "sweep":
            print(f"wrote {experiments.cmd_sweep(_load_sweep(args))}")
        elif args.command == "preset":
            if args.name is None:
                for name, spec in experiments.PRESETS.items():
                    print(f"{name:18s} {spec['doc']}")
                return 0
            if args.name not in experiments.PRESETS:
                print(
                    f"unknown preset {args.name!r}; available: {', '.join(experiments.preset_names())}",
                    file=sys.stderr,
                )
                return 1
            for path in experiments.cmd_preset(args.name, args.out or "runs", args.seed):
                print(f"wrote {path}")
        elif args.command == "gradient-check":
            ok, report = experiments.cmd_gradient_check(_load_run(args), args.points, args.pairs)
            print(report)
            return 0 if ok else 2
        elif args.command == "plot":
            cols = [c.strip() for c in args.columns.split(",") if c.strip()]
            print(f"wrote {emit_plot(args.csv, cols, args.out)}")
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
