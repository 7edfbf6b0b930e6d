"""Concrete dynamical systems: piecewise-linear interval maps, symbolic
Markov models, and the sine-squared conjugacy of the logistic map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .partition import Interval, IntervalPartition, MeasureVector

IMAGE_TOL = 1e-12
ROW_SUM_TOL = 1e-14


@dataclass(frozen=True)
class Branch:
    """Affine piece ``x -> slope * x + intercept`` on a closed domain."""

    domain: Interval
    slope: float
    intercept: float

    def __post_init__(self):
        if not abs(self.slope) > 1.0:
            raise DomainError(f"branch slope {self.slope} is not expanding")
        lo, hi = sorted((self(self.domain.lo), self(self.domain.hi)))
        if lo < -IMAGE_TOL or hi > 1.0 + IMAGE_TOL:
            raise DomainError(f"branch image [{lo}, {hi}] leaves [0, 1]")

    def __call__(self, x):
        return self.slope * x + self.intercept

    def image(self) -> tuple[float, float]:
        a, b = self(self.domain.lo), self(self.domain.hi)
        return (min(a, b), max(a, b))

    def inverse(self, y):
        # Anchored at the domain end mapping to the image's low end, so that
        # end is reproduced exactly.
        if self.slope > 0:
            return self.domain.lo + (y - self(self.domain.lo)) / self.slope
        return self.domain.hi + (y - self(self.domain.hi)) / self.slope


@dataclass(frozen=True)
class PiecewiseLinearMap:
    branches: tuple[Branch, ...]
    name: str = "piecewise-linear"

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        IntervalPartition.from_cells([b.domain for b in self.branches])
        bps = [b.domain.lo for b in self.branches] + [1.0]
        object.__setattr__(self, "_bps", np.array(bps))
        object.__setattr__(self, "_slopes", np.array([b.slope for b in self.branches]))
        object.__setattr__(self, "_intercepts", np.array([b.intercept for b in self.branches]))

    @property
    def base_partition(self) -> IntervalPartition:
        """Partition into branch domains; Markov for every full-branch map."""
        return IntervalPartition(self._bps)

    def branch_index(self, x):
        return np.searchsorted(self._bps[1:-1], x, side="left")

    def __call__(self, x):
        """Vectorised evaluation without domain checks, for orbit simulation."""
        idx = self.branch_index(x)
        return np.clip(self._slopes[idx] * x + self._intercepts[idx], 0.0, 1.0)

    def is_full_branch(self, tol: float = IMAGE_TOL) -> bool:
        return all(abs(lo) <= tol and abs(hi - 1.0) <= tol for lo, hi in (b.image() for b in self.branches))


def apply_map(m: PiecewiseLinearMap, x: float) -> float:
    """Image of ``x`` under the branch whose domain contains it (left wins at shared ends)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    branch = m.branches[int(m.branch_index(x))]
    return min(1.0, max(0.0, branch(x)))


def _check_open_unit(name, value):
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name}={value} must lie in (0, 1)")


def make_skewed_tent(x0: float) -> PiecewiseLinearMap:
    _check_open_unit("x0", x0)
    left = Branch(Interval(0.0, x0), 1.0 / x0, 0.0)
    right = Branch(Interval(x0, 1.0), -1.0 / (1.0 - x0), 1.0 / (1.0 - x0))
    return PiecewiseLinearMap((left, right), name=f"tent(x0={x0!r})")


def make_doubling(skew: float) -> PiecewiseLinearMap:
    _check_open_unit("skew", skew)
    left = Branch(Interval(0.0, skew), 1.0 / skew, 0.0)
    right = Branch(Interval(skew, 1.0), 1.0 / (1.0 - skew), -skew / (1.0 - skew))
    return PiecewiseLinearMap((left, right), name=f"doubling(skew={skew!r})")


@dataclass(frozen=True, eq=False)
class SymbolicMarkovModel:
    """Finite-state model given directly by its transition structure."""

    transition: np.ndarray
    state_measure: MeasureVector
    name: str = "symbolic"
    labels: tuple = ()

    def __post_init__(self):
        P = np.array(self.transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DomainError("transition matrix must be square")
        if np.any(P < 0):
            raise DomainError("transition matrix has negative entries")
        rows = P.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > ROW_SUM_TOL:
            raise DomainError(f"rows do not sum to 1: {rows}")
        if len(self.state_measure) != P.shape[0]:
            raise DomainError("state measure length does not match the state count")
        P.setflags(write=False)
        object.__setattr__(self, "transition", P)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i + 1) for i in range(P.shape[0])))

    @property
    def state_count(self) -> int:
        return self.transition.shape[0]


SQRT5 = math.sqrt(5.0)
GOLDEN_SMALL = (3.0 - SQRT5) / 2.0  # also the contracting eigenvalue of [[2,1],[1,1]]
GOLDEN_CONJ = (SQRT5 - 1.0) / 2.0


def cat_map_measures() -> np.ndarray:
    """Lebesgue areas of the five cells of the generating partition."""
    r = math.sqrt((SQRT5 + 3.0) / 10.0)
    return np.array([
        GOLDEN_SMALL * r,
        (SQRT5 - 2.0) * r,
        GOLDEN_SMALL * r,
        GOLDEN_CONJ * (1.0 - r),
        GOLDEN_SMALL * (1.0 - r),
    ])


def make_cat_map_model() -> SymbolicMarkovModel:
    a, b, c = GOLDEN_SMALL, SQRT5 - 2.0, GOLDEN_CONJ
    T0 = np.array([
        [a, 0.0, a, b, 0.0],
        [a, 0.0, a, b, 0.0],
        [a, 0.0, a, b, 0.0],
        [0.0, c, 0.0, 0.0, a],
        [0.0, c, 0.0, 0.0, a],
    ])
    return SymbolicMarkovModel(T0, MeasureVector(cat_map_measures()), name="cat",
                               labels=("L1", "L2", "L3", "L4", "L5"))


def cat_map_eigenvalues() -> np.ndarray:
    """Closed-form leading eigenvalues of the five hole-punched cat-map chains."""
    lam = 3.0 - SQRT5
    return np.array([lam, lam, lam, lam, (1.0 + math.sqrt(2.0)) / 2.0 * lam])


@dataclass(frozen=True)
class Conjugacy:
    forward: Callable
    inverse: Callable

    def check(self, n: int = 10_000, tol: float = 1e-10) -> float:
        """Max round-trip error on an ``n``-point grid; raises if above ``tol``."""
        grid = np.linspace(0.0, 1.0, n)
        err = float(np.max(np.abs(self.inverse(self.forward(grid)) - grid)))
        if err > tol:
            raise DomainError(f"conjugacy round trip error {err} exceeds {tol}")
        return err


def _sin2(x):
    return np.sin(np.pi * np.asarray(x) / 2.0) ** 2


def _arcsin_sqrt(y):
    return 2.0 / np.pi * np.arcsin(np.sqrt(np.clip(y, 0.0, 1.0)))


LOGISTIC_CONJUGACY = Conjugacy(_sin2, _arcsin_sqrt)


def logistic(x):
    x = np.asarray(x)
    return 4.0 * x * (1.0 - x)


def make_logistic_partition(n: int) -> tuple[IntervalPartition, MeasureVector]:
    """Image of the dyadic partition into 2**n cells under the conjugacy.

    Each cell carries invariant measure 2**-n.
    """
    if n < 1:
        raise DomainError(f"n={n} must be a positive integer")
    k = 2 ** n
    i = np.arange(k + 1)
    bps = np.sin(i * np.pi / 2 ** (n + 1)) ** 2
    bps[0], bps[k // 2], bps[-1] = 0.0, 0.5, 1.0
    return IntervalPartition(bps), MeasureVector.uniform(k)


def load_map_spec(spec) -> dict:
    """Validate a map-spec document given as JSON text or a dict.

    Returns a normalised dict with keys ``kind``, ``x0``/``skew`` when
    applicable, and ``level``.
    """
    if isinstance(spec, (str, bytes)):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise DomainError("map spec must be a JSON object")
    kind = spec.get("kind")
    if kind not in ("tent", "doubling", "cat", "logistic"):
        raise DomainError(f"unknown map kind {kind!r}")
    level = spec.get("level", 1 if kind == "logistic" else 0)
    if isinstance(level, bool) or not isinstance(level, int) or level < 0:
        raise DomainError(f"level must be a nonnegative integer, got {level!r}")
    out = {"kind": kind, "level": level}
    if kind == "tent":
        if "x0" not in spec:
            raise DomainError("tent spec needs x0")
        _check_open_unit("x0", float(spec["x0"]))
        out["x0"] = float(spec["x0"])
    elif kind == "doubling":
        if "skew" not in spec:
            raise DomainError("doubling spec needs skew")
        _check_open_unit("skew", float(spec["skew"]))
        out["skew"] = float(spec["skew"])
    elif kind == "logistic" and level < 1:
        raise DomainError("logistic level must be at least 1")
    return out


def build_map(spec: dict) -> PiecewiseLinearMap | None:
    """Interval map for a normalised spec; None for symbolic-only systems."""
    if spec["kind"] == "tent":
        return make_skewed_tent(spec["x0"])
    if spec["kind"] == "doubling":
        return make_doubling(spec["skew"])
    if spec["kind"] == "logistic":
        return make_skewed_tent(0.5)
    return None


__all__ = [
    "Branch", "PiecewiseLinearMap", "SymbolicMarkovModel", "Conjugacy",
    "apply_map", "make_skewed_tent", "make_doubling", "make_cat_map_model",
    "cat_map_measures", "cat_map_eigenvalues", "make_logistic_partition",
    "LOGISTIC_CONJUGACY", "logistic", "load_map_spec", "build_map",
]
