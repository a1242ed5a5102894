"""Command-line interface.

Subcommands mirror the pipeline stages:

    sigtab synth          --out DIR
    sigtab features       --family stats|catch22|signature|sentiment
                          --prices F [--events F] --out F
    sigtab assemble       --features F [F ...] --universe F
                          [--financials F] --out F
    sigtab normalize      --dataset F --out F
    sigtab split          --out DIR
    sigtab train-baseline --dataset F --targets F --scheme F --out F
    sigtab evaluate       (--predictions F | --model F --dataset F)
                          --targets F --scheme F --period validation|test
                          --out DIR
    sigtab report         --report F [--corr-series F]

Every subcommand accepts --config FILE (JSON) plus field overrides; flags
beat the file.  Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline
from .config import load_config
from .errors import InvalidInputError, IOStageError


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its fields")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--windows", type=int, nargs="+", help="override look-back windows")
    parser.add_argument("--signature-depth", type=int, dest="signature_depth")
    parser.add_argument("--quantiles", type=int)
    parser.add_argument("--ridge-lambda", type=float, dest="ridge_lambda")
    parser.add_argument("--calendar-start", dest="calendar_start")
    parser.add_argument("--calendar-end", dest="calendar_end")
    parser.add_argument("--category-count", type=int, dest="category_count")
    parser.add_argument("--signal-strength", type=float, dest="synth.signal_strength")
    parser.add_argument("--n-assets", type=int, dest="synth.n_assets")
    parser.add_argument("--force", action="store_true",
                        help="accept inputs whose config digest does not match")


def _config_from_args(args: argparse.Namespace):
    overrides = {
        key: value
        for key, value in vars(args).items()
        if key in (
            "seed", "windows", "signature_depth", "quantiles", "ridge_lambda",
            "calendar_start", "calendar_end", "category_count",
            "synth.signal_strength", "synth.n_assets",
        )
    }
    return load_config(args.config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigtab",
        description="Feature engineering and weekly rank backtesting for financial time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic input files")
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p)

    p = sub.add_parser("features", help="compute one feature family at weekly anchors")
    p.add_argument("--family", required=True, choices=pipeline.FAMILIES)
    p.add_argument("--prices", required=True)
    p.add_argument("--events", help="events file (sentiment family only)")
    p.add_argument("--out", required=True)
    _add_config_flags(p)

    p = sub.add_parser("assemble", help="join feature families on the weekly universe")
    p.add_argument("--features", required=True, nargs="+")
    p.add_argument("--universe", required=True)
    p.add_argument("--financials", help="monthly financials to resample and join")
    p.add_argument("--out", required=True)
    _add_config_flags(p)

    p = sub.add_parser("normalize", help="rank-quantize each column within each week")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)

    p = sub.add_parser("split", help="write walk-forward scheme manifests")
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p)

    p = sub.add_parser("train-baseline", help="fit the ridge ranker on a scheme's train period")
    p.add_argument("--dataset", required=True, help="quantized dataset")
    p.add_argument("--targets", required=True)
    p.add_argument("--scheme", required=True, help="scheme manifest from the split command")
    p.add_argument("--out", required=True, help="model file to write")
    _add_config_flags(p)

    p = sub.add_parser("evaluate", help="score predictions over a scheme period")
    p.add_argument("--predictions", help="externally produced predictions file")
    p.add_argument("--model", help="baseline model file (needs --dataset)")
    p.add_argument("--dataset", help="quantized dataset to predict from")
    p.add_argument("--targets", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--period", required=True, choices=["validation", "test"])
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p)

    p = sub.add_parser("report", help="pretty-print a report file")
    p.add_argument("--report", required=True)
    p.add_argument("--corr-series", dest="corr_series")

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            paths = pipeline.run_synth(_config_from_args(args), args.out)
            for name, path in paths.items():
                print(f"wrote {name}: {path}")
        elif args.command == "features":
            path = pipeline.run_features(
                _config_from_args(args), args.family, args.prices, args.out,
                events_path=args.events, force=args.force,
            )
            print(f"wrote features: {path}")
        elif args.command == "assemble":
            path = pipeline.run_assemble(
                _config_from_args(args), args.features, args.universe, args.out,
                financials_path=args.financials, force=args.force,
            )
            print(f"wrote dataset: {path}")
        elif args.command == "normalize":
            path = pipeline.run_normalize(
                _config_from_args(args), args.dataset, args.out, force=args.force
            )
            print(f"wrote quantized dataset: {path}")
        elif args.command == "split":
            for path in pipeline.run_split(_config_from_args(args), args.out):
                print(f"wrote scheme manifest: {path}")
        elif args.command == "train-baseline":
            path = pipeline.run_train_baseline(
                _config_from_args(args), args.dataset, args.targets, args.scheme,
                args.out, force=args.force,
            )
            print(f"wrote model: {path}")
        elif args.command == "evaluate":
            written = pipeline.run_evaluate(
                _config_from_args(args), args.targets, args.scheme, args.period,
                args.out, predictions_path=args.predictions, model_path=args.model,
                dataset_path=args.dataset, force=args.force,
            )
            for name, path in written.items():
                print(f"wrote {name}: {path}")
            print(pipeline.render_report(written["report"], written.get("corr_series")))
        elif args.command == "report":
            print(pipeline.render_report(args.report, args.corr_series))
        else:  # pragma: no cover - argparse enforces the choices
            raise AssertionError(args.command)
    except IOStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
