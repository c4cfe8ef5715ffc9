"""Command-line interface: run experiments, list presets, compare files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, experiments, presets
from .estimators import ANALYTIC, EMPIRICAL, CorrelationCurve, NumberDistribution
from .io import read_table_csv


def _load_csv_object(path: Path):
    """Rebuild a CorrelationCurve or NumberDistribution from a CSV file."""
    names, data = read_table_csv(path)
    if names[:2] == ["lag_s", "g2"]:
        stderr = data[:, 2] if data.shape[1] > 2 else np.zeros(data.shape[0])
        return CorrelationCurve(data[:, 0], data[:, 1], stderr)
    if names[:2] == ["n", "probability"]:
        order = np.argsort(data[:, 0])
        n = data[order, 0].astype(int)
        if n[0] != 0 or np.any(np.diff(n) != 1):
            raise experiments.ConfigError(f"{path}: n column must be 0..n_max")
        probs = data[order, 1]
        for source in (EMPIRICAL, ANALYTIC):
            try:
                return NumberDistribution(probs, source)
            except ValueError:
                continue
        raise experiments.ConfigError(f"{path}: not a normalized distribution")
    raise experiments.ConfigError(
        f"{path}: expected columns lag_s,g2[,stderr] or n,probability"
    )


def _cmd_run(args) -> int:
    path = Path(args.config)
    if path.exists():
        cfg = experiments.load_config(path)
    else:
        cfg = presets.load(args.config)
    result = experiments.run_experiment(cfg, render_figures=not args.no_figures)
    for report in result.reports:
        print(report.line())
    status = "all comparisons pass" if result.passed else "comparison FAILURES"
    print(f"{status}; outputs in {result.output_dir}")
    return 0 if result.passed else 1


def _cmd_presets(_args) -> int:
    for name, description in presets.available().items():
        print(f"{name:20s} {description}")
    return 0


def _cmd_compare(args) -> int:
    a = _load_csv_object(Path(args.file_a))
    b = _load_csv_object(Path(args.file_b))
    report = experiments.compare(a, b, args.metric, args.threshold,
                                 name=f"{Path(args.file_a).name} vs "
                                      f"{Path(args.file_b).name}")
    print(report.line())
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tailored-light",
        description="Simulate and analyze classical light with tailored "
                    "temporal coherence and photon number distributions.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser(
        "run", help="run an experiment from a config file or preset name")
    run_p.add_argument("config", help="path to a TOML config, or a preset name")
    run_p.add_argument("--no-figures", action="store_true",
                       help="skip rendering PNG figures")
    run_p.set_defaults(func=_cmd_run)

    presets_p = sub.add_parser("presets", help="list built-in presets")
    presets_p.set_defaults(func=_cmd_presets)

    cmp_p = sub.add_parser(
        "compare", help="compare two CSV curves or distributions")
    cmp_p.add_argument("file_a")
    cmp_p.add_argument("file_b")
    cmp_p.add_argument("--metric", required=True,
                       choices=list(experiments.METRICS))
    cmp_p.add_argument("--threshold", required=True, type=float)
    cmp_p.set_defaults(func=_cmd_compare)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except experiments.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
