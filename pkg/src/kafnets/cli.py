"""Command line entry point: ``kafnets train|eval|export-shapes|count-params``."""
import argparse
import json
import logging
import os
import sys

from .config import load_config
from .exceptions import ConfigError, DataError, NumericError
from .experiment import count_params_for_config, evaluate_model, export_shapes, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def build_parser():
    parser = argparse.ArgumentParser(prog="kafnets", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run an experiment described by a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", help="overrides output_dir from the config")

    p = sub.add_parser("eval", help="score a saved model on a CSV file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)

    p = sub.add_parser("export-shapes", help="sample trained activation shapes to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--neurons", required=True, help="LAYER:NEURONS, e.g. 1:0,3 or 1:0-5 or 1:all")
    p.add_argument("--range", type=_range, default=(-3.0, 3.0), help="LO:HI (default -3:3)")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", help="output directory (default: shapes/ next to the model)")

    p = sub.add_parser("count-params", help="print trainable-parameter counts for a config")
    p.add_argument("--config", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "train":
            cfg = load_config(args.config)
            doc = run_experiment(cfg, args.output_dir)
            print(json.dumps({"mean": doc["mean"], "std": doc["std"], "n_params": doc["n_params"]}, indent=2))
        elif args.command == "eval":
            print(json.dumps(evaluate_model(args.model, args.data), indent=2))
        elif args.command == "export-shapes":
            out = args.out or os.path.join(os.path.dirname(os.path.abspath(args.model)), "shapes")
            lo, hi = args.range
            for path in export_shapes(args.model, args.neurons, lo, hi, args.points, out):
                print(path)
        elif args.command == "count-params":
            print(json.dumps(count_params_for_config(load_config(args.config)), indent=2))
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
