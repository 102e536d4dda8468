"""Command line interface: run experiments, generate wave data, self-test."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .dataset import generate_waveform
from .harness import (
    ALL_SCENARIOS,
    ClassifierSpec,
    DatasetRecipe,
    ExperimentConfig,
    Scenario,
    emit_table,
    emit_timing_table,
    run_experiment,
)
from .selftest import run_selftest

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mccalib",
        description="Calibrated multi-class probabilities for small data sets",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run calibration scenarios over CV folds")
    run.add_argument("--config", help="experiment config JSON (overrides the flags below)")
    run.add_argument("--data", help="input CSV file")
    run.add_argument("--label", help="label column name or index")
    run.add_argument("--classifier", choices=["nb", "rf"], default="nb")
    run.add_argument(
        "--scenario",
        action="append",
        choices=[s.value for s in ALL_SCENARIOS],
        help="repeatable; default: all five scenarios",
    )
    run.add_argument("--folds", type=int, default=10)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--delimiter", default=",")
    run.add_argument("--no-header", action="store_true", help="CSV has no header row")
    run.add_argument("--out", help="write tables here (default: stdout)")
    run.add_argument("--format", choices=["csv", "markdown", "json"], default="markdown")

    gen = sub.add_parser("gen-waveform", help="write a synthetic wave dataset as CSV")
    gen.add_argument("--n", type=int, default=5000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    sub.add_parser("selftest", help="run the oracle cross-check suite")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        return ExperimentConfig.from_file(args.config)
    if not args.data or args.label is None:
        raise SystemExit("run needs either --config or both --data and --label")
    label = args.label
    if args.no_header:
        label = int(label)
    else:
        try:
            label = int(label)
        except ValueError:
            pass
    scenarios = tuple(Scenario(s) for s in args.scenario) if args.scenario else ALL_SCENARIOS
    recipe = DatasetRecipe(
        id=Path(args.data).stem,
        path=args.data,
        label_column=label,
        delimiter=args.delimiter,
        header=not args.no_header,
    )
    return ExperimentConfig(
        datasets=(recipe,),
        classifiers=(ClassifierSpec(name=args.classifier),),
        scenarios=scenarios,
        n_folds=args.folds,
        seed=args.seed,
    )


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    result = run_experiment(cfg)
    if not result.results:
        for dataset_id, clf, message in result.failures:
            print(f"FAILED {dataset_id} [{clf}]: {message}", file=sys.stderr)
        return 1
    table = emit_table(result, args.format)
    if args.out:
        out = Path(args.out)
        out.write_text(table)
        if args.format != "json":  # json already contains timings per fold
            timing_path = out.with_name(out.stem + "_timing" + out.suffix)
            timing_path.write_text(emit_timing_table(result, args.format))
            print(f"wrote {out} and {timing_path}")
        else:
            print(f"wrote {out}")
    else:
        print(table)
        if args.format != "json":
            print(emit_timing_table(result, args.format))
    for dataset_id, clf, message in result.failures:
        print(f"FAILED {dataset_id} [{clf}]: {message}", file=sys.stderr)
    return 1 if result.failures else 0


def _cmd_gen_waveform(args) -> int:
    ds = generate_waveform(args.n, args.seed)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(ds.n_features)] + ["label"])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [ds.class_names[label]])
    print(f"wrote {args.out} ({ds.n_samples} samples, {ds.n_classes} classes)")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "gen-waveform":
        return _cmd_gen_waveform(args)
    if args.command == "selftest":
        return 0 if run_selftest() else 1
    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
