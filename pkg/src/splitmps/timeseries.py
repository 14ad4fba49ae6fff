"""Sampled-observable time series and its streaming CSV format.

Files carry the resolved configuration as leading ``# key = value`` comment
lines, then a header row and one data row per sample. Floats are written with
``repr`` so a re-read round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

COLUMNS = ("t", "sz", "norm", "energy", "max_bond_entropy", "wall_ms")


@dataclass
class TimeSeries:
    """Rows of sampled observables plus provenance metadata."""

    t: list[float] = field(default_factory=list)
    sz: list[float] = field(default_factory=list)
    norm: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    max_bond_entropy: list[float] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)
    extra: dict[str, list[float]] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)

    def append(self, **row: float) -> None:
        for name in COLUMNS:
            getattr(self, name).append(float(row.pop(name)))
        for name, value in row.items():
            self.extra.setdefault(name, []).append(float(value))

    def __len__(self) -> int:
        return len(self.t)


def _fmt(x: float) -> str:
    return repr(float(x))


class TimeSeriesWriter:
    """Streams rows to CSV as they are produced, flushing after each row."""

    def __init__(self, path: str | Path, metadata: dict[str, str] | None = None,
                 extra_columns: Sequence[str] = ()):
        self.path = Path(path)
        self.metadata = dict(metadata or {})
        self.extra_columns = tuple(extra_columns)
        self._fh: IO[str] | None = None

    def __enter__(self) -> "TimeSeriesWriter":
        self._fh = open(self.path, "w", newline="")
        for key, value in self.metadata.items():
            self._fh.write(f"# {key} = {value}\n")
        self._fh.write(",".join(COLUMNS + self.extra_columns) + "\n")
        self._fh.flush()
        return self

    def write_row(self, **row: float) -> None:
        assert self._fh is not None
        fields = [_fmt(row[name]) for name in COLUMNS]
        fields += [_fmt(row[name]) for name in self.extra_columns]
        self._fh.write(",".join(fields) + "\n")
        self._fh.flush()

    def __exit__(self, *exc) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def write_timeseries_csv(series: TimeSeries, path: str | Path) -> None:
    extra = tuple(series.extra)
    with TimeSeriesWriter(path, series.metadata, extra) as writer:
        for i in range(len(series)):
            row = {name: getattr(series, name)[i] for name in COLUMNS}
            row.update({name: series.extra[name][i] for name in extra})
            writer.write_row(**row)


def read_timeseries_csv(path: str | Path) -> TimeSeries:
    series = TimeSeries()
    with open(path, newline="") as fh:
        header: list[str] | None = None
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    series.metadata[key.strip()] = value.strip()
                continue
            row = next(csv.reader([line]))
            if header is None:
                header = row
                continue
            values = {name: float(v) if v else math.nan for name, v in zip(header, row)}
            series.append(**values)
    return series
