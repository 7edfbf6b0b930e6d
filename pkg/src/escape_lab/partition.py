"""Interval partitions of [0, 1] and probability vectors over their cells.

Cells are closed intervals that share endpoints with their neighbours.
For point location the shared endpoint belongs to the left cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, PartitionError

MIN_CELL_LENGTH = 1e-12
MEASURE_SUM_TOL = 1e-12
_CONTACT_TOL = 1e-15


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= 1.0 and 0.0 <= self.hi <= 1.0):
            raise PartitionError(f"interval [{self.lo}, {self.hi}] leaves [0, 1]")
        if not self.lo < self.hi:
            raise PartitionError(f"interval [{self.lo}, {self.hi}] has nonpositive length")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class PartitionIssue:
    kind: str  # "gap", "overlap", "short-cell", "bounds", "empty"
    lo: float
    hi: float

    def __str__(self):
        return f"{self.kind} on ({self.lo!r}, {self.hi!r})"


@dataclass(frozen=True)
class PartitionReport:
    issues: tuple[PartitionIssue, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.valid

    def __str__(self):
        if self.valid:
            return "valid"
        return "; ".join(str(issue) for issue in self.issues)


def validate_partition(cells: Iterable, min_cell_length: float = MIN_CELL_LENGTH) -> PartitionReport:
    """Check an ordered sequence of cells against the partition invariants.

    ``cells`` may hold :class:`Interval` objects or ``(lo, hi)`` pairs, so
    that malformed input can be diagnosed without first being constructed.
    Never raises; every violation found is listed in the report.
    """
    pairs = [(c.lo, c.hi) if isinstance(c, Interval) else (float(c[0]), float(c[1])) for c in cells]
    issues = []
    if not pairs:
        return PartitionReport((PartitionIssue("empty", 0.0, 1.0),))
    if pairs[0][0] != 0.0:
        issues.append(PartitionIssue("bounds", 0.0, pairs[0][0]))
    if pairs[-1][1] != 1.0:
        issues.append(PartitionIssue("bounds", pairs[-1][1], 1.0))
    for lo, hi in pairs:
        if hi - lo < min_cell_length:
            issues.append(PartitionIssue("short-cell", lo, hi))
    for (_, hi), (lo, _) in zip(pairs, pairs[1:]):
        if lo - hi > _CONTACT_TOL:
            issues.append(PartitionIssue("gap", hi, lo))
        elif hi - lo > _CONTACT_TOL:
            issues.append(PartitionIssue("overlap", lo, hi))
    return PartitionReport(tuple(issues))


@dataclass(frozen=True, eq=False)
class IntervalPartition:
    """Ordered cover of [0, 1] by contiguous closed cells.

    Stored as the sorted breakpoint array ``[0, b1, ..., 1]``.
    """

    breakpoints: np.ndarray
    min_cell_length: float = field(default=MIN_CELL_LENGTH, repr=False)

    def __post_init__(self):
        bps = _frozen(self.breakpoints)
        if bps.ndim != 1 or bps.size < 2:
            raise PartitionError("a partition needs at least two breakpoints")
        report = validate_partition(zip(bps[:-1], bps[1:]), self.min_cell_length)
        if not report.valid:
            raise PartitionError(f"invalid partition: {report}")
        object.__setattr__(self, "breakpoints", bps)

    @classmethod
    def from_cells(cls, cells: Sequence[Interval]) -> "IntervalPartition":
        report = validate_partition(cells)
        if not report.valid:
            raise PartitionError(f"invalid partition: {report}")
        return cls([cells[0].lo] + [c.hi for c in cells])

    @classmethod
    def uniform(cls, k: int) -> "IntervalPartition":
        return cls(np.linspace(0.0, 1.0, k + 1))

    def __len__(self):
        return self.breakpoints.size - 1

    def __eq__(self, other):
        if not isinstance(other, IntervalPartition):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints)

    def __hash__(self):
        return hash(self.breakpoints.tobytes())

    @property
    def cells(self) -> tuple[Interval, ...]:
        b = self.breakpoints
        return tuple(Interval(float(lo), float(hi)) for lo, hi in zip(b[:-1], b[1:]))

    def cell(self, j: int) -> Interval:
        return Interval(float(self.breakpoints[j]), float(self.breakpoints[j + 1]))

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def locate(self, x):
        """Index of the cell holding ``x``; shared endpoints go to the left cell."""
        idx = np.searchsorted(self.breakpoints[1:-1], x, side="left")
        return int(idx) if np.ndim(idx) == 0 else idx

    def to_json(self) -> str:
        return json.dumps([float(f"{b:.17g}") for b in self.breakpoints])

    @classmethod
    def from_json(cls, text: str) -> "IntervalPartition":
        return cls(json.loads(text))


@dataclass(frozen=True, eq=False)
class MeasureVector:
    """Nonnegative weights, one per cell, summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("measure vector must be a nonempty 1-d sequence")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise PartitionError("measure weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > MEASURE_SUM_TOL:
            raise PartitionError(f"measure weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, MeasureVector):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    @classmethod
    def uniform(cls, k: int) -> "MeasureVector":
        return cls(np.full(k, 1.0 / k))


def lebesgue_measure(p: IntervalPartition) -> MeasureVector:
    return MeasureVector(p.lengths)
