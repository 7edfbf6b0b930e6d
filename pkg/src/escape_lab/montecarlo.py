"""Monte Carlo survival of orbit ensembles, an independent check on the
spectral escape rates.

Random numbers come from numpy's Philox4x64 counter-based generator. The
sample set is cut into fixed-size blocks; block ``b`` draws from
``SeedSequence(seed, spawn_key=(b,))``. Because the block size is fixed,
the survival counts for a given seed do not depend on how many workers run
the blocks. Runs are reproducible on one build; bit identity across numpy
versions or platforms is not promised.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._workers import ordered_map
from .errors import DomainError, InsufficientDataError
from .maps import PiecewiseLinearMap
from .partition import Interval

BLOCK_SIZE = 1 << 20
MIN_COUNT = 100
INITIAL_LAWS = ("complement", "uniform")


@dataclass(frozen=True, eq=False)
class SurvivalSeries:
    """``counts[n]`` is the number of samples still outside the hole after n steps."""

    counts: np.ndarray
    sample_count: int
    seed: int

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.size == 0 or c[0] != self.sample_count:
            raise DomainError("counts[0] must equal the sample count")
        if np.any(np.diff(c) > 0):
            raise DomainError("survival counts must be non-increasing")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n_max(self) -> int:
        return self.counts.size - 1

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.sample_count

    def __eq__(self, other):
        if not isinstance(other, SurvivalSeries):
            return NotImplemented
        return (self.sample_count == other.sample_count and self.seed == other.seed
                and np.array_equal(self.counts, other.counts))

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["n", "survivors", "fraction"])
        for n, (c, f) in enumerate(zip(self.counts, self.fractions)):
            out.writerow([n, int(c), f"{f:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, seed: int = 0) -> "SurvivalSeries":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        counts = [int(r[1]) for r in rows]
        return cls(np.array(counts), counts[0], seed)


def in_hole(x: np.ndarray, hole: Interval) -> np.ndarray:
    """Half-open ``[lo, hi)`` membership, closed at 1 for the last cell."""
    if hole.hi >= 1.0:
        return x >= hole.lo
    return (x >= hole.lo) & (x < hole.hi)


def _initial_points(rng: np.random.Generator, n: int, hole: Interval, initial: str) -> np.ndarray:
    u = rng.random(n)
    if initial == "uniform":
        return u
    # Uniform on [0, 1] minus the hole: squeeze, then step over the hole.
    x = u * (1.0 - hole.length)
    return np.where(x < hole.lo, x, x + hole.length)


def _block_counts(m, hole, n_max, seed, block, size, initial) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    x = _initial_points(rng, size, hole, initial)
    counts = np.zeros(n_max + 1, dtype=np.int64)
    counts[0] = size
    if initial == "uniform":
        x = x[~in_hole(x, hole)]
    for n in range(1, n_max + 1):
        if x.size == 0:
            break
        x = m(x)
        x = x[~in_hole(x, hole)]
        counts[n] = x.size
    return counts


def simulate_survival(m: PiecewiseLinearMap, hole: Interval, n_max: int, n_samples: int,
                      seed: int = 0, initial: str = "complement",
                      workers: int | None = None) -> SurvivalSeries:
    """Iterate ``n_samples`` orbits until they enter ``hole`` or ``n_max`` steps pass.

    ``initial`` is ``"complement"`` (uniform off the hole, the default) or
    ``"uniform"`` on [0, 1]; under the latter, samples born in the hole are
    counted at n=0 and escape at the first step.
    """
    if n_max < 1 or n_samples < 1:
        raise DomainError("n_max and n_samples must be positive")
    if initial not in INITIAL_LAWS:
        raise DomainError(f"unknown initial law {initial!r}")
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    sizes = [BLOCK_SIZE] * (n_samples // BLOCK_SIZE)
    if n_samples % BLOCK_SIZE:
        sizes.append(n_samples % BLOCK_SIZE)
    parts = ordered_map(
        lambda b: _block_counts(m, hole, n_max, seed, b, sizes[b], initial),
        range(len(sizes)), workers)
    return SurvivalSeries(np.sum(parts, axis=0), n_samples, seed)


@dataclass(frozen=True)
class RateFit:
    rate: float
    stderr: float
    window: tuple[int, int]


def fit_escape_rate(s: SurvivalSeries, window: tuple[int, int] = (5, 20),
                    min_count: int = MIN_COUNT) -> RateFit:
    """Least-squares slope of ``ln S(n)`` against n; the rate is minus the slope.

    The window's upper end is pulled in to the last n with at least
    ``min_count`` survivors, and the window actually used is reported.
    Fewer than three usable points raise :class:`InsufficientDataError`.
    """
    lo, hi = window
    if lo < 0 or hi > s.n_max or lo >= hi:
        raise DomainError(f"window {window} not inside [0, {s.n_max}]")
    counts = s.counts
    if counts[lo] < min_count:
        raise InsufficientDataError(f"only {counts[lo]} survivors at n={lo} (< {min_count})")
    while counts[hi] < min_count:
        hi -= 1
    if hi - lo + 1 < 3:
        raise InsufficientDataError(
            f"window {window} leaves {hi - lo + 1} points with >= {min_count} survivors")
    n = np.arange(lo, hi + 1, dtype=float)
    y = np.log(counts[lo:hi + 1].astype(float))
    nc = n - n.mean()
    sxx = float(nc @ nc)
    slope = float(nc @ (y - y.mean())) / sxx
    resid = y - y.mean() - slope * nc
    dof = n.size - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx)
    return RateFit(-slope, stderr, (lo, hi))
