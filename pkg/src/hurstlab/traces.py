"""Packet-capture ingestion: CSV records to binned series, sliding-window scans.

Capture input is a CSV export with header "timestamp,bytes" (arrival
seconds, frame length).  Binning aligns bin edges to multiples of the bin
width, sums bytes or counts frames per bin, and zero-fills empty interior
bins, so total bytes are conserved exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .estimators import (
    DEFAULT_CONFIG,
    DegenerateSeries,
    EstimatorConfig,
    HurstEstimate,
    Method,
    NoConvergence,
    estimate,
)
from .series import as_values


class ParseError(ValueError):
    """A malformed capture row; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyCapture(ValueError):
    """The capture contained no records."""


@dataclass(frozen=True)
class PacketRecord:
    """One captured frame: arrival time in seconds and size in bytes."""

    timestamp: float
    size: int

    def __post_init__(self):
        if not (math.isfinite(self.timestamp) and self.timestamp >= 0.0):
            raise ValueError("timestamp must be finite and non-negative")
        if self.size < 1:
            raise ValueError("size must be at least 1 byte")


class Unit(str, Enum):
    BYTES = "bytes"
    FRAMES = "frames"


@dataclass(frozen=True)
class BinnedSeries:
    """Traffic volume per fixed-width time bin."""

    bin_width: float
    origin: float
    values: np.ndarray
    unit: Unit

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.size < 1 or np.any(arr < 0):
            raise ValueError("binned values must be non-empty and non-negative")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class WindowScan:
    """Sliding-window Hurst estimates over a long series."""

    window_length: int
    stride: int
    points: tuple[tuple[int, HurstEstimate], ...]
    failures: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if not 1 <= self.stride < self.window_length:
            raise ValueError("stride must satisfy 1 <= stride < window_length")
        starts = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("window starts must be strictly increasing")


def parse_capture_csv(source) -> list[PacketRecord]:
    """Parse a capture CSV (header "timestamp,bytes") into sorted records.

    Accepts a path, a text or byte stream, or raw bytes.  Raises
    ParseError with the offending line number, or EmptyCapture when no
    records follow the header.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_capture_csv(fh)
    if isinstance(source, bytes):
        return parse_capture_csv(io.StringIO(source.decode("utf-8")))

    records: list[PacketRecord] = []
    header_seen = False
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        text = raw.strip()
        if not text:
            continue
        if not header_seen:
            if text.lower() != "timestamp,bytes":
                raise ParseError(lineno, f'expected header "timestamp,bytes", got {text!r}')
            header_seen = True
            continue
        fields = text.split(",")
        if len(fields) != 2:
            raise ParseError(lineno, f"expected 2 fields, got {len(fields)}")
        try:
            timestamp = float(fields[0])
            size = int(fields[1])
            records.append(PacketRecord(timestamp=timestamp, size=size))
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from exc
    if not header_seen:
        raise ParseError(1, 'missing header "timestamp,bytes"')
    if not records:
        raise EmptyCapture("capture contains no records")
    records.sort(key=lambda r: r.timestamp)
    return records


def bin_to_series(records: Sequence[PacketRecord], bin_width: float, unit: Unit = Unit.BYTES) -> BinnedSeries:
    """Aggregate records into bins [origin + k*w, origin + (k+1)*w).

    Bin edges align to multiples of bin_width (origin = the first record's
    bin start); the last bin is the one containing the final record, and
    empty interior bins hold zero.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if not records:
        raise ValueError("at least one record is required")
    unit = Unit(unit)
    times = np.array([r.timestamp for r in records])
    weights = np.array([float(r.size) for r in records])
    first = times.min()
    origin = math.floor(first / bin_width) * bin_width
    indices = np.floor((times - origin) / bin_width).astype(int)
    values = np.zeros(int(indices.max()) + 1)
    np.add.at(values, indices, weights if unit is Unit.BYTES else 1.0)
    return BinnedSeries(bin_width=float(bin_width), origin=float(origin), values=values, unit=unit)


def sliding_window_scan(
    series,
    window: int,
    stride: int,
    method: Method,
    config: EstimatorConfig = DEFAULT_CONFIG,
) -> WindowScan:
    """Estimate H on every block [t_i, t_i + window), t_i = i * stride.

    Windows run while t_i + window <= len(series); ones that raise
    DegenerateSeries (or otherwise fail) are recorded under failures with
    the reason instead of aborting the scan.
    """
    if isinstance(series, BinnedSeries):
        series = series.values
    x = as_values(series)
    total = x.size
    if window > total:
        raise ValueError("window exceeds series length")
    if not 1 <= stride < window:
        raise ValueError("stride must satisfy 1 <= stride < window")
    method = Method(method)
    points: list[tuple[int, HurstEstimate]] = []
    failures: list[tuple[int, str]] = []
    for start in range(0, total - window + 1, stride):
        try:
            points.append((start, estimate(x[start : start + window], method, config)))
        except (DegenerateSeries, NoConvergence, ValueError) as exc:
            failures.append((start, f"error:{type(exc).__name__}"))
    return WindowScan(
        window_length=window, stride=stride, points=tuple(points), failures=tuple(failures)
    )


def window_count(total: int, window: int, stride: int) -> int:
    """Closed-form number of windows: floor((M - window) / stride) + 1."""
    return (total - window) // stride + 1


def write_window_scan_csv(path, scan: WindowScan, bin_width: float = 1.0, origin: float = 0.0) -> None:
    """Window-scan CSV: t_start_index, t_start_seconds, H, ci_low, ci_high, status."""
    rows: dict[int, tuple] = {}
    for start, est in scan.points:
        ci_low = "" if est.ci_low is None else f"{est.ci_low:.10g}"
        ci_high = "" if est.ci_high is None else f"{est.ci_high:.10g}"
        rows[start] = (f"{est.value:.10g}", ci_low, ci_high, "ok")
    for start, reason in scan.failures:
        rows[start] = ("", "", "", reason)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_start_index", "t_start_seconds", "H", "ci_low", "ci_high", "status"])
        for start in sorted(rows):
            h, lo, hi, status = rows[start]
            writer.writerow([start, f"{origin + start * bin_width:.10g}", h, lo, hi, status])
