"""Delimited-output and manifest writers.

All writers are deterministic: the same in-memory objects always
produce byte-identical files (floats use shortest-stable %.12g, JSON is
key-sorted, no timestamps anywhere).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .detection import BinnedCounts
from .estimators import CorrelationCurve, NumberDistribution


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write(path: Path, header_comments: list[str], column_names: list[str],
           rows) -> None:
    lines = [f"# {c}" for c in header_comments]
    lines.append(",".join(column_names))
    lines.extend(rows)
    path.write_text("\n".join(lines) + "\n")


def write_curve_csv(path: Path, curve: CorrelationCurve, comment: str) -> None:
    rows = (f"{_fmt(lag)},{_fmt(val)},{_fmt(err)}"
            for lag, val, err in zip(curve.lags, curve.values, curve.stderr))
    _write(path, [comment, "units: lag_s in seconds, g2 dimensionless"],
           ["lag_s", "g2", "stderr"], rows)


def write_distribution_csv(path: Path, dist: NumberDistribution,
                           comment: str) -> None:
    rows = (f"{n},{_fmt(p)}" for n, p in enumerate(dist.probs))
    _write(path, [comment, f"source: {dist.source}, mean={_fmt(dist.mean)}"],
           ["n", "probability"], rows)


def write_counts_csv(path: Path, counts: BinnedCounts, comment: str) -> None:
    body = "\n".join(
        f"{i},{c}" for i, c in enumerate(counts.counts.tolist())
    )
    head = "\n".join([
        f"# {comment}",
        f"# bin_width_s={_fmt(counts.bin_width)}, origin_time_s={_fmt(counts.origin_time)}",
        "bin_index,count",
    ])
    path.write_text(head + "\n" + body + "\n")


def write_samples_csv(path: Path, samples: np.ndarray, sample_period: float,
                      comment: str) -> None:
    body = "\n".join(
        f"{i},{_fmt(v)}" for i, v in enumerate(np.asarray(samples).tolist())
    )
    head = "\n".join([
        f"# {comment}",
        f"# sample_period_s={_fmt(sample_period)}",
        "sample_index,intensity",
    ])
    path.write_text(head + "\n" + body + "\n")


def write_table_csv(path: Path, column_names: list[str],
                    columns: list[np.ndarray], comment: str) -> None:
    cols = [np.asarray(c) for c in columns]
    rows = (",".join(_fmt(col[i]) for col in cols) for i in range(cols[0].size))
    _write(path, [comment], column_names, rows)


def read_table_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a csv written by this module: (column names, 2-d float array)."""
    names = None
    data = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if names is None:
                names = line.split(",")
                continue
            data.append([float(tok) for tok in line.split(",")])
    if names is None or not data:
        raise ValueError(f"{path}: no table found")
    return names, np.asarray(data)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
