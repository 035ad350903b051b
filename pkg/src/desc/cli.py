"""Command-line entry point: ``desc train|evaluate|predict|extract-features|profile``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .config import load_config
from .errors import ConfigError, DescError

COMMANDS = ("train", "evaluate", "predict", "extract-features", "profile")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="desc", description="Figurative-language classification toolkit.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value run configuration")
    parser.add_argument("--model-dir", help="trained artifact directory (train output, evaluate/predict input)")
    parser.add_argument("--input", help="tab-separated id<TAB>label<TAB>text file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _need(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise ConfigError(f"`desc {args.command}` requires --{name}")


def run(args) -> int:
    if args.command in ("train", "extract-features", "profile"):
        _need(args, "config", "input")
    cfg = load_config(args.config, args.seed) if args.config else None

    if args.command == "train":
        out = args.model_dir or args.out or cfg.output_dir
        if out is None:
            raise ConfigError("`desc train` requires --model-dir, --out or output_dir in the config")
        harness.cmd_train(cfg, args.input, out)
        print((Path(out) / "reports" / "weights.txt").read_text(encoding="utf-8"), end="")
    elif args.command == "evaluate":
        _need(args, "model-dir", "input")
        report = harness.cmd_evaluate(cfg, args.model_dir, args.input, args.out)
        print(harness.metrics_table(report), end="")
    elif args.command == "predict":
        _need(args, "model-dir", "input")
        text = harness.cmd_predict(args.model_dir, args.input, args.out, cfg)
        if args.out is None:
            sys.stdout.write(text)
    elif args.command == "extract-features":
        text = harness.cmd_extract_features(cfg, args.input, args.out)
        if args.out is None:
            sys.stdout.write(text)
    elif args.command == "profile":
        profile = harness.cmd_profile(cfg, args.input, args.out)
        if args.out is None:
            sys.stdout.write(profile.to_csv())
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return run(args)
    except DescError as exc:
        print(f"desc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
