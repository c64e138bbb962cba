"""Command-line interface: ``circula fit | simulate | loglik | rose | summary``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .circular import TWO_PI, wc_density
from .estimation import McmcConfig, fit
from .io import (
    LoadError,
    format_csv,
    load_csv,
    load_model,
    model_from_summary,
    save_model,
    summary_to_dict,
)
from .vine import joint_log_density, simulate


class CliError(Exception):
    pass


def _summary_table(d: dict) -> str:
    lines = [f"{'':>10} {'mean':>9} {'sd':>9} {'median':>9} {'rhat':>7}"]
    for e in d["parameters"]:
        lines.append(f"{e['name']:>10} {e['mean']:9.4f} {e['sd']:9.4f} "
                     f"{e['median']:9.4f} {e['rhat']:7.3f}")
    return "\n".join(lines)


def cmd_fit(args) -> int:
    series = load_csv(args.data)
    if args.p < 0:
        raise CliError("--p must be nonnegative")
    config = McmcConfig(chains=args.chains, iterations=args.iters, warmup=args.warmup,
                        thinning=args.thin, seed=args.seed)
    summary = fit(series.data, config, p=args.p)
    d = summary_to_dict(summary, config, data_path=args.data)
    d["metadata"]["series"] = list(series.names)
    if args.out:
        Path(args.out).write_text(json.dumps(d, indent=2) + "\n")
    if args.model_out:
        save_model(summary.point_model(), args.model_out)
    print(_summary_table(d))
    return 0


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    if args.T < 1:
        raise CliError("--T must be at least 1")
    series = simulate(model, args.T, seed=args.seed)
    text = format_csv(series)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_loglik(args) -> int:
    model = load_model(args.model)
    series = load_csv(args.data)
    if series.m != model.m:
        raise CliError(f"dimension mismatch: model has m={model.m}, data has {series.m} columns")
    print(f"{joint_log_density(model, series):.10g}")
    return 0


def _column(series, column: str) -> int:
    if column in series.names:
        return series.names.index(column)
    if column.isdigit() and 1 <= int(column) <= series.m:
        return int(column) - 1
    raise CliError(f"unknown column {column!r}; available: {', '.join(series.names)}")


def rose_table(angles, bins: int, density=None) -> list[tuple]:
    """Equal-width histogram rows ``(start, end, count, rel_freq[, density])``."""
    if bins < 2:
        raise CliError("--bins must be at least 2")
    angles = np.asarray(angles, dtype=float)
    width = TWO_PI / bins
    idx = np.minimum((angles // width).astype(int), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    rows = []
    for b in range(bins):
        row = (b * width, (b + 1) * width, int(counts[b]), counts[b] / angles.size)
        if density is not None:
            row += (float(density((b + 0.5) * width)),)
        rows.append(row)
    return rows


def cmd_rose(args) -> int:
    series = load_csv(args.data)
    col = _column(series, args.column)
    density = None
    if args.model:
        model = load_model(args.model)
        if model.m != series.m:
            raise CliError(f"dimension mismatch: model has m={model.m}, data has {series.m} columns")
        marginal = model.marginals[col]
        density = lambda theta: wc_density(theta, marginal)
    rows = rose_table(series.data[:, col], args.bins, density)
    header = "bin_start_rad,bin_end_rad,count,relative_frequency"
    print(header + (",density" if density else ""))
    for row in rows:
        cells = [f"{row[0]:.6f}", f"{row[1]:.6f}", str(row[2]), f"{row[3]:.6f}"]
        if density:
            cells.append(f"{row[4]:.6f}")
        print(",".join(cells))
    return 0


def cmd_summary(args) -> int:
    try:
        d = json.loads(Path(args.summary).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{args.summary}: cannot read summary ({exc})") from None
    print(_summary_table(d))
    if args.model_out:
        save_model(model_from_summary(d), args.model_out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circula",
                                     description="Pair-circula models for circular time series.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a stationary Markov pair-circula model by MCMC")
    p.add_argument("--data", required=True)
    p.add_argument("--p", type=int, default=2, help="Markov order (default 2)")
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--iters", type=int, default=3000)
    p.add_argument("--warmup", type=int, default=100)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="summary JSON path")
    p.add_argument("--model-out", help="write the posterior-mean model JSON here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="simulate a series from a model JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("loglik", help="joint log density of a dataset under a model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_loglik)

    p = sub.add_parser("rose", help="rose-diagram histogram of one column as CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--column", required=True, help="column name or 1-based index")
    p.add_argument("--bins", type=int, default=16)
    p.add_argument("--model", help="add the fitted marginal density at bin midpoints")
    p.set_defaults(func=cmd_rose)

    p = sub.add_parser("summary", help="print a summary JSON as a table")
    p.add_argument("summary")
    p.add_argument("--model-out", help="write the posterior-mean model JSON here")
    p.set_defaults(func=cmd_summary)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (LoadError, CliError, ValueError) as exc:
        print(f"circula {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
