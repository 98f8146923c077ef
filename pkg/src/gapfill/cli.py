"""``gapfill`` command line: impute, bench and inject.

Exit codes are 0 on success, 1 for configuration problems and 2 for data
problems. ``GAPFILL_LOG`` (error, warn, info, debug) sets log verbosity.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .baselines import impute
from .bench import ALL_METHODS, BenchmarkConfig, emit_report, run_benchmark, write_imputations, write_plot_data
from .datasets import m3_like
from .errors import ConfigError, DataError, UnsupportedInputError
from .hinge import PipelineConfig, hinge_fm2i
from .series import GapSpec, Layout, MaskedSeries, TimeSeries, center_gap, find_single_gap, inject_gap, load_csv, write_csv

logger = logging.getLogger("gapfill")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
IMPUTE_METHODS = ("hinge-left", "hinge-right") + ALL_METHODS[1:]


class _Parser(argparse.ArgumentParser):
    """Usage mistakes are configuration errors, so they exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gapfill", description="Fill gaps in univariate time series.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io_args(sp, output_help):
        sp.add_argument("--input", "-i", required=True, help="input CSV ('-' for stdin)")
        sp.add_argument("--output", "-o", default="-", help=output_help)
        sp.add_argument("--layout", choices=[x.value for x in Layout], default=Layout.ONE_SERIES_PER_ROW.value)

    def pipeline_args(sp):
        sp.add_argument("--patch-size", type=int, default=9)
        sp.add_argument("--rows", type=int, default=32)
        sp.add_argument("--plain-ssd", action="store_true",
                        help="match patches on raw SSD without level compensation")

    imp = sub.add_parser("impute", help="impute one gap per series")
    io_args(imp, "output CSV with the imputed series ('-' for stdout)")
    imp.add_argument("--method", "-m", choices=IMPUTE_METHODS, default="hinge-left")
    imp.add_argument("--gap-start", type=int, help="first missing index (0-based)")
    imp.add_argument("--gap-size", type=int, help="number of missing values")
    pipeline_args(imp)

    bench = sub.add_parser("bench", help="gap-injection benchmark across methods and gap sizes")
    src = bench.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", "-i", help="dataset CSV ('-' for stdin)")
    src.add_argument("--synthetic", type=int, metavar="N", help="use N generated M3-like series instead")
    bench.add_argument("--output", "-o", default="-")
    bench.add_argument("--layout", choices=[x.value for x in Layout], default=Layout.ONE_SERIES_PER_ROW.value)
    bench.add_argument("--gap-sizes", type=_int_list, default=(5, 10, 20))
    bench.add_argument("--methods", type=_str_list, default=("all",),
                       help="comma-separated: all, hinge, hinge-left, hinge-right, " + ", ".join(ALL_METHODS[1:]))
    bench.add_argument("--sides", type=_str_list, default=("left", "right"))
    bench.add_argument("--min-length", type=int, default=70)
    bench.add_argument("--seed", type=int, default=0, help="generator seed for --synthetic")
    bench.add_argument("--format", choices=("csv", "json"), default="csv")
    bench.add_argument("--keep-imputations", metavar="DIR", help="write truth/imputed pairs to DIR")
    bench.add_argument("--emit-plot-data", metavar="FILE", help="write per-run sMAPE as long-form CSV")
    bench.add_argument("--jobs", "-j", type=int, default=1)
    pipeline_args(bench)

    inj = sub.add_parser("inject", help="blank out a gap in complete series")
    io_args(inj, "output CSV ('-' for stdout)")
    inj.add_argument("--gap-size", type=int, required=True)
    inj.add_argument("--gap-start", type=int, help="defaults to the centred position")
    return p


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _read_input(path: str, layout: str, series_id: str = "series") -> list[TimeSeries]:
    if path == "-":
        return load_csv(sys.stdin.read(), layout, series_id)
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return load_csv(raw, layout, Path(path).stem if layout == Layout.TWO_COLUMN.value else series_id)


def _pipeline(args) -> PipelineConfig:
    return PipelineConfig(patch_size=args.patch_size, rows=args.rows, offset_compensation=not args.plain_ssd)


def _masked(series: TimeSeries, start: int | None, size: int | None) -> MaskedSeries:
    if start is None and size is None:
        return find_single_gap(series)
    if start is None or size is None:
        raise ConfigError("--gap-start and --gap-size go together")
    gap = GapSpec(start, size)
    gap.check_bounds(len(series))
    missing = series.missing
    inside = missing[gap.start : gap.stop]
    outside = np.delete(missing, gap.indices)
    if outside.any():
        raise UnsupportedInputError(f"series {series.id!r} has missing values outside the requested gap")
    if inside.all():
        return MaskedSeries(series, gap)
    if not inside.any():
        return inject_gap(series, gap)
    raise UnsupportedInputError(f"series {series.id!r} is only partly missing inside the requested gap")


def cmd_impute(args) -> int:
    cfg = _pipeline(args)
    out = []
    for series in _read_input(args.input, args.layout):
        masked = _masked(series, args.gap_start, args.gap_size)
        if args.method.startswith("hinge-"):
            result = hinge_fm2i(masked, args.method.split("-", 1)[1], cfg)
            logger.info("%s: family %d row %d (hinge error %.3g)", series.id,
                        result.chosen.family, result.chosen.row, result.chosen.hinge_error)
            out.append(result.imputed_series)
        else:
            out.append(impute(masked, args.method))
    with _open_out(args.output) as fh:
        write_csv(out, fh, args.layout)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchmarkConfig(
        gap_sizes=args.gap_sizes,
        methods=args.methods,
        sides=args.sides,
        min_length=args.min_length,
        seed=args.seed,
        output_format=args.format,
        pipeline=_pipeline(args),
        keep_imputations=bool(args.keep_imputations),
        jobs=args.jobs,
    )
    if args.synthetic is not None:
        dataset = m3_like(args.synthetic, seed=args.seed, min_length=args.min_length)
    else:
        dataset = _read_input(args.input, args.layout)
    report = run_benchmark(dataset, cfg)
    with _open_out(args.output) as fh:
        emit_report(report, args.format, fh)
    if args.keep_imputations:
        folder = Path(args.keep_imputations)
        folder.mkdir(parents=True, exist_ok=True)
        with open(folder / "imputations.csv", "w", newline="") as fh:
            write_imputations(report, fh)
    if args.emit_plot_data:
        with _open_out(args.emit_plot_data) as fh:
            write_plot_data(report, fh)
    return EXIT_OK


def cmd_inject(args) -> int:
    out = []
    for series in _read_input(args.input, args.layout):
        gap = center_gap(len(series), args.gap_size) if args.gap_start is None else GapSpec(args.gap_start, args.gap_size)
        out.append(inject_gap(series, gap).base)
    with _open_out(args.output) as fh:
        write_csv(out, fh, args.layout)
    return EXIT_OK


def _configure_logging() -> None:
    level = os.environ.get("GAPFILL_LOG", "warn").strip().lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    handler = {"impute": cmd_impute, "bench": cmd_bench, "inject": cmd_inject}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"gapfill: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"gapfill: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
