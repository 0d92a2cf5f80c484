"""CSV readers and writers for the command-line data products.

All files carry header rows.  Floats are serialized with 17 significant
digits, so a write/read round trip reproduces values exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ._validation import check_sample_array
from .estimator import SpectralEstimate
from .mcstudy import McReport

__all__ = [
    "read_estimate_csv",
    "read_samples_csv",
    "write_estimate_csv",
    "write_samples_csv",
    "write_study_csvs",
]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_samples_csv(path, data: np.ndarray) -> None:
    """Write a (n, r) sample array with header ``ch1,...,chr``."""
    data = check_sample_array(data)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"ch{i + 1}" for i in range(data.shape[1])])
        for row in data:
            writer.writerow([_fmt(v) for v in row])


def read_samples_csv(path) -> np.ndarray:
    """Read a samples CSV written by :func:`write_samples_csv`."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or not all(name.strip().startswith("ch") for name in header):
            raise ValueError(f"{path}: expected a header row 'ch1,ch2,...'")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no sample rows")
    width = len(header)
    if any(len(row) != width for row in rows):
        raise ValueError(f"{path}: ragged rows (header has {width} channels)")
    return check_sample_array(np.asarray(rows))


def _pair_label(a1: int, a2: int) -> str:
    return f"{a1 + 1}-{a2 + 1}"


def write_estimate_csv(path, estimate: SpectralEstimate) -> None:
    """Write an estimate as ``lambda,pair,re,im`` rows (all ordered pairs)."""
    r = estimate.n_channels
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["lambda", "pair", "re", "im"])
        for f, lam in enumerate(estimate.frequencies):
            for a1 in range(r):
                for a2 in range(r):
                    value = estimate.values[f, a1, a2]
                    writer.writerow([_fmt(lam), _pair_label(a1, a2), _fmt(value.real), _fmt(value.imag)])


def read_estimate_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an estimate CSV back into ``(frequencies, values)``.

    ``values`` has shape (n_frequencies, r, r) with ``r`` inferred from the
    pair labels.
    """
    entries: dict[tuple[float, int, int], complex] = {}
    channels = 0
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["lambda", "pair", "re", "im"]:
            raise ValueError(f"{path}: expected header 'lambda,pair,re,im'")
        for row in reader:
            if not row:
                continue
            lam, pair, re, im = row
            first, _, second = pair.partition("-")
            a1, a2 = int(first) - 1, int(second) - 1
            channels = max(channels, a1 + 1, a2 + 1)
            entries[(float(lam), a1, a2)] = complex(float(re), float(im))
    if not entries:
        raise ValueError(f"{path}: no estimate rows")
    freqs = np.array(sorted({key[0] for key in entries}))
    values = np.zeros((freqs.size, channels, channels), dtype=complex)
    for f, lam in enumerate(freqs):
        for a1 in range(channels):
            for a2 in range(channels):
                try:
                    values[f, a1, a2] = entries[(lam, a1, a2)]
                except KeyError:
                    raise ValueError(
                        f"{path}: missing entry for frequency {lam} pair {_pair_label(a1, a2)}"
                    ) from None
    return freqs, values


def write_study_csvs(out_dir, report: McReport) -> list[str]:
    """Write ``ks.csv``, ``coverage.csv`` and ``summary.csv`` for a study."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    path = out / "ks.csv"
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["lambda", "stat", "D", "pvalue"])
        for f, lam in enumerate(report.frequencies):
            for j, name in enumerate(report.stat_names):
                writer.writerow([_fmt(lam), name, _fmt(report.ks_stat[f, j]), _fmt(report.ks_pvalue[f, j])])
    paths.append(str(path))

    path = out / "coverage.csv"
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["lambda", "stat", "coverage", "invalid_count"])
        for f, lam in enumerate(report.frequencies):
            for j, name in enumerate(report.stat_names):
                writer.writerow(
                    [_fmt(lam), name, _fmt(report.coverage[f, j]), int(report.invalid_count[f, j])]
                )
    paths.append(str(path))

    path = out / "summary.csv"
    percents = report.pct_p_above(0.05)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stat", "pct_p_above_05"])
        for j, name in enumerate(report.stat_names):
            writer.writerow([name, _fmt(percents[j])])
    paths.append(str(path))
    return paths
