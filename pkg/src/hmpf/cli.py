"""Batch command-line front end.

Subcommands::

    hmpf extract  --manifest M --method hog|gist --split reference|query --out F
    hmpf run      --manifest M --config C --out results.csv [--workers N]
    hmpf eval     --manifest M --config C --out report.csv [--curves F]
    hmpf sweep    --manifest M --config C --out sweep.csv --k-schedule 10,5,all ...
    hmpf synth    --out DIR [--n-refs N --n-queries N --methods N --seed S]

Every failure prints a single line ``error:<category>: <message>`` to stderr
and exits with the category's code: usage=2, io=3, validation=4, method=5,
internal=1.  Outputs are deterministic for identical inputs apart from
timing columns.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import ConfigError, PipelineConfig, load_config
from .dataset import Dataset, DatasetError, load_dataset
from .descriptors import compute_gist, compute_hog, load_image, resize
from .evaluation import (
    ExperimentReport,
    GroundTruthOracle,
    characterize_methods,
    run_experiment,
    write_curves_csv,
    write_report_csv,
)
from .io import FeatureFileError, write_feature_file
from .methods import MethodError
from .synthetic import generate_synthetic_benchmark
from .types import ValidationError

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_METHOD = 5


class CliError(Exception):
    """Failure with a fixed reporting category."""

    def __init__(self, category: str, code: int, message: str) -> None:
        super().__init__(message)
        self.category = category
        self.code = code


def _usage(message: str) -> CliError:
    return CliError("usage", EXIT_USAGE, message)


def cmd_extract(args: argparse.Namespace) -> int:
    if args.method not in ("hog", "gist"):
        raise _usage(f"extract supports hog and gist, not {args.method!r}")
    try:
        dataset = load_dataset(args.manifest)
    except DatasetError as exc:
        raise _usage(str(exc)) from exc
    paths = (
        dataset.reference_images
        if args.split == "reference"
        else dataset.query_images
    )
    if any(p is None for p in paths):
        raise _usage(
            "manifest declares image counts only; extraction needs image files"
        )

    if args.method == "hog":
        side = args.resize

        def describe(path: Path):
            return compute_hog(resize(load_image(path), side, side), args.cell_px)
    else:

        def describe(path: Path):
            return compute_gist(load_image(path))

    import numpy as np

    rows = np.stack([describe(p).values for p in paths]).astype(np.float32)
    write_feature_file(args.out, rows)
    print(f"wrote {rows.shape[0]} vectors of dim {rows.shape[1]} to {args.out}")
    return EXIT_OK


def _load_pair(args: argparse.Namespace) -> tuple[Dataset, PipelineConfig, Path]:
    dataset = load_dataset(args.manifest)
    config = load_config(args.config)
    return dataset, config, Path(args.config).parent


def cmd_run(args: argparse.Namespace) -> int:
    dataset, config, base_dir = _load_pair(args)
    report = run_experiment(
        dataset, config, base_dir=base_dir, workers=args.workers, name="run"
    )
    oracle = GroundTruthOracle.from_dataset(dataset)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "query",
                "final_best",
                "final_correct",
                "combined_best",
                "combined_correct",
                "selected_sizes",
                "tier_ms",
            ]
        )
        for result in report.results:
            combined = "" if result.combined_best is None else result.combined_best
            combined_ok = (
                ""
                if result.combined_best is None
                else int(oracle.is_correct(result.query, result.combined_best))
            )
            sizes = ";".join(
                str(len(r.selected)) for r in result.tier_records
            )
            millis = ";".join(f"{s * 1e3:.3f}" for s in result.tier_seconds)
            writer.writerow(
                [
                    result.query,
                    result.final_tier_best,
                    int(oracle.is_correct(result.query, result.final_tier_best)),
                    combined,
                    combined_ok,
                    sizes,
                    millis,
                ]
            )
    print(f"wrote {report.n_queries} rows to {args.out}")
    return EXIT_OK


def _parse_n_values(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise _usage(f"bad --n-values {text!r}: {exc}") from exc
    if any(v < 1 for v in values) or list(values) != sorted(set(values)):
        raise _usage(f"--n-values must be ascending positive integers, got {text!r}")
    return values


def cmd_eval(args: argparse.Namespace) -> int:
    n_values = _parse_n_values(args.n_values)
    dataset, config, base_dir = _load_pair(args)
    report = run_experiment(
        dataset, config, base_dir=base_dir, workers=args.workers, name="eval"
    )
    write_report_csv([report], args.out)
    if args.curves:
        specs = [m for tier in config.tiers for m in tier.methods]
        curves = characterize_methods(dataset, specs, n_values, base_dir=base_dir)
        write_curves_csv(curves, args.curves)
        print(f"wrote report to {args.out} and curves to {args.curves}")
    else:
        print(f"wrote report to {args.out}")
    return EXIT_OK


def _parse_schedule(text: str, n_tiers: int) -> tuple[int | None, ...]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != n_tiers:
        raise _usage(
            f"schedule {text!r} has {len(parts)} entries for {n_tiers} tiers"
        )
    out: list[int | None] = []
    for part in parts:
        if part == "all":
            out.append(None)
        else:
            try:
                out.append(int(part))
            except ValueError as exc:
                raise _usage(f"bad schedule entry {part!r} in {text!r}") from exc
    return tuple(out)


def cmd_sweep(args: argparse.Namespace) -> int:
    dataset, config, base_dir = _load_pair(args)
    if not args.k_schedule:
        raise _usage("sweep needs at least one --k-schedule")
    schedules = [_parse_schedule(t, config.n_tiers) for t in args.k_schedule]
    names = list(args.k_schedule)
    parallel = (None,) * config.n_tiers
    if parallel not in schedules:
        schedules.insert(0, parallel)
        names.insert(0, ",".join(["all"] * config.n_tiers))
    reports: list[ExperimentReport] = []
    for name, schedule in zip(names, schedules):
        try:
            swept = config.with_k_schedule(schedule)
        except ConfigError as exc:
            raise _usage(str(exc)) from exc
        reports.append(
            run_experiment(
                dataset, swept, base_dir=base_dir,
                workers=args.workers, name=f"k={name}",
            )
        )
    write_report_csv(reports, args.out)
    print(f"wrote {len(reports)} sweep rows to {args.out}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    bench = generate_synthetic_benchmark(
        args.out,
        n_refs=args.n_refs,
        n_queries=args.n_queries,
        n_methods=args.methods,
        n_distractors=args.distractors,
        seed=args.seed,
        frame_tolerance=args.frame_tolerance,
    )
    print(
        f"wrote {len(bench.reference_files) + len(bench.query_files)} feature "
        f"files, manifest, and config to {bench.out_dir}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmpf", description="Hierarchical multi-method place matching."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute descriptors into a feature file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--split", choices=("reference", "query"), default="reference")
    p.add_argument("--out", required=True)
    p.add_argument("--cell-px", type=int, default=30, dest="cell_px")
    p.add_argument("--resize", type=int, default=300)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("run", help="run the hierarchy, one CSV row per query")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="run and summarize recalls into a report CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--curves", default=None)
    p.add_argument("--n-values", default="1,5,10,20", dest="n_values")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate several candidate-count schedules")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--k-schedule",
        action="append",
        dest="k_schedule",
        help="comma-separated per-tier candidate counts; 'all' disables "
        "truncation; repeatable",
    )
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate the seeded synthetic benchmark")
    p.add_argument("--out", required=True)
    p.add_argument("--n-refs", type=int, default=50, dest="n_refs")
    p.add_argument("--n-queries", type=int, default=50, dest="n_queries")
    p.add_argument("--methods", type=int, default=3)
    p.add_argument("--distractors", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--frame-tolerance", type=int, default=2, dest="frame_tolerance")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error:{exc.category}: {exc}", file=sys.stderr)
        return exc.code
    except MethodError as exc:
        print(f"error:method: {exc}", file=sys.stderr)
        return EXIT_METHOD
    except (ConfigError, DatasetError, ValidationError, FeatureFileError) as exc:
        print(f"error:validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
