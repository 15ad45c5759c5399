"""Metrics CSV (schema version 1) and the wall-clock sidecar.

The metrics file holds only quantities determined by (config, seed), so a
repeated run reproduces it byte for byte. Elapsed time lives in a separate
timing file with the same ``iteration`` column.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from armac.trainer.candidates import default_candidates

SCHEMA_VERSION = 1
CANDIDATE_NAMES = tuple(c.name for c in default_candidates())
COLUMNS = (
    "iteration",
    "acting_steps",
    "nash_conv_avg",
    "nash_conv_current",
    "primary",
    *(f"return_{name}" for name in CANDIDATE_NAMES),
)
TIMING_COLUMNS = ("iteration", "seconds")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite metric {x!r}")
    return repr(x)


@dataclass
class MetricsRow:
    iteration: int
    acting_steps: int
    nash_conv_avg: float | None = None
    nash_conv_current: float | None = None
    primary: str | None = None
    candidate_returns: list = field(default_factory=list)
    seconds: float = 0.0

    def cells(self) -> list[str]:
        for v in (self.nash_conv_avg, self.nash_conv_current):
            if v is not None and v < -1e-9:
                raise ValueError(f"negative NashConv {v}")
        returns = list(self.candidate_returns) or [None] * len(CANDIDATE_NAMES)
        if len(returns) != len(CANDIDATE_NAMES):
            raise ValueError("one return per candidate expected")
        nc = [None if v is None else max(v, 0.0) for v in (self.nash_conv_avg, self.nash_conv_current)]
        return [fmt(self.iteration), fmt(self.acting_steps), fmt(nc[0]), fmt(nc[1]), fmt(self.primary), *map(fmt, returns)]


class MetricsWriter:
    """Streams rows to ``metrics`` and ``timing`` text handles (flushed per row)."""

    def __init__(self, metrics, timing=None):
        self._m = csv.writer(metrics, lineterminator="\n")
        self._t = csv.writer(timing, lineterminator="\n") if timing is not None else None
        self._handles = [h for h in (metrics, timing) if h is not None]
        self._last_steps = -1
        self._m.writerow(COLUMNS)
        if self._t:
            self._t.writerow(TIMING_COLUMNS)

    def write(self, row: MetricsRow) -> None:
        if row.acting_steps < self._last_steps:
            raise ValueError("acting_steps must be non-decreasing")
        self._last_steps = row.acting_steps
        self._m.writerow(row.cells())
        if self._t:
            self._t.writerow([fmt(row.iteration), f"{row.seconds:.3f}"])
        for h in self._handles:
            h.flush()


def read_metrics(text: str) -> list[dict]:
    """Parse a metrics CSV back into dicts of floats/ints/None (strings for ``primary``)."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError("metrics header does not match schema version 1")
    out = []
    for rec in reader:
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
            elif k == "primary":
                row[k] = v
            elif k in ("iteration", "acting_steps"):
                row[k] = int(v)
            else:
                row[k] = float(v)
        out.append(row)
    return out
