"""Markov refinements and (sub)stochastic transition matrices."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, DomainError, MarkovViolationError, RefinementDegenerateError
from .maps import IMAGE_TOL, PiecewiseLinearMap, SymbolicMarkovModel
from .partition import IntervalPartition, MeasureVector

ROW_SUM_SLACK = 1e-12
MARKOV_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SubstochasticMatrix:
    """Nonnegative square matrix with row sums at most one.

    ``holes`` lists the zeroed rows (empty for a closed system).
    """

    entries: np.ndarray
    holes: tuple[int, ...] = ()

    def __post_init__(self):
        P = np.array(self.entries, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise DimensionError(f"expected a nonempty square matrix, got shape {P.shape}")
        if np.any(~np.isfinite(P)) or np.any(P < 0):
            raise DomainError("entries must be finite and nonnegative")
        if np.any(P.sum(axis=1) > 1.0 + ROW_SUM_SLACK):
            raise DomainError("row sums exceed 1")
        holes = tuple(sorted(set(int(i) for i in self.holes)))
        for i in holes:
            if not 0 <= i < P.shape[0]:
                raise DomainError(f"hole index {i} out of range")
            if np.any(P[i] != 0):
                raise DomainError(f"hole row {i} is not zero")
        P.setflags(write=False)
        object.__setattr__(self, "entries", P)
        object.__setattr__(self, "holes", holes)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    @property
    def hole_index(self) -> int | None:
        return self.holes[0] if len(self.holes) == 1 else None

    def is_stochastic(self, tol: float = ROW_SUM_SLACK) -> bool:
        return bool(np.all(np.abs(self.entries.sum(axis=1) - 1.0) <= tol))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for row in self.entries:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, holes: Iterable[int] = ()) -> "SubstochasticMatrix":
        rows = [[float(v) for v in line.split(",")] for line in text.splitlines() if line.strip()]
        return cls(np.array(rows), tuple(holes))


def _pull_back(m: PiecewiseLinearMap, points: np.ndarray) -> list[float]:
    # Points at the ends of a branch image pull back to the branch's own
    # domain endpoints, which the base partition already holds.
    out = []
    for branch in m.branches:
        lo, hi = branch.image()
        inside = points[(points > lo + IMAGE_TOL) & (points < hi - IMAGE_TOL)]
        out.extend(np.atleast_1d(branch.inverse(inside)).tolist())
    return out


def refine(m: PiecewiseLinearMap, base: IntervalPartition | None = None, levels: int = 1,
           min_cell_length: float | None = None) -> IntervalPartition:
    """Pull the breakpoints of ``base`` back through the branches ``levels`` times.

    The result holds every x in [0, 1] with T^j(x) a base breakpoint for some
    j <= levels. For a full-branch map with b branches each level multiplies
    the cell count by b.
    """
    if levels < 0:
        raise DomainError(f"levels={levels} must be nonnegative")
    base = m.base_partition if base is None else base
    min_len = base.min_cell_length if min_cell_length is None else min_cell_length
    base_pts = base.breakpoints
    current = base_pts
    for _ in range(levels):
        pts = np.unique(np.concatenate([base_pts, _pull_back(m, current)]))
        short = np.diff(pts) < min_len
        if np.any(short):
            j = int(np.argmax(short))
            raise RefinementDegenerateError(
                f"refinement produced cell [{pts[j]!r}, {pts[j + 1]!r}] shorter than {min_len}")
        current = pts
    return IntervalPartition(current, min_cell_length=min_len)


def cells_for_levels(branch_count: int, base_cells: int, levels: int) -> int:
    return base_cells * branch_count ** levels


def levels_for_cells(k: int, branch_count: int = 2, base_cells: int = 2) -> int:
    """Refinement depth giving ``k`` cells for a full-branch map."""
    levels, n = 0, base_cells
    while n < k:
        n *= branch_count
        levels += 1
    if n != k:
        raise DomainError(f"{k} cells is not reachable from {base_cells} by factors of {branch_count}")
    return levels


@dataclass(frozen=True)
class MarkovReport:
    markov: bool
    cell: int | None = None
    message: str = ""
    violations: tuple[int, ...] = ()

    def __bool__(self):
        return self.markov


def _nearest_breakpoint(bps: np.ndarray, y: float) -> tuple[int, float]:
    j = int(np.argmin(np.abs(bps - y)))
    return j, abs(bps[j] - y)


def _cell_image(m: PiecewiseLinearMap, p: IntervalPartition, i: int, tol: float) -> tuple[int, int]:
    """Cells ``ja:jb`` covering the image of cell ``i``; raises if there are none."""
    bps = p.breakpoints
    lo, hi = bps[i], bps[i + 1]
    branch = m.branches[int(m.branch_index(0.5 * (lo + hi)))]
    if lo < branch.domain.lo - tol or hi > branch.domain.hi + tol:
        raise MarkovViolationError(f"cell {i} [{lo!r}, {hi!r}] straddles a branch boundary", cell=i)
    a, b = sorted((branch(lo), branch(hi)))
    ja, da = _nearest_breakpoint(bps, a)
    jb, db = _nearest_breakpoint(bps, b)
    if da > tol or db > tol:
        raise MarkovViolationError(f"image [{a!r}, {b!r}] of cell {i} is not a union of cells", cell=i)
    return ja, jb


def check_markov(m: PiecewiseLinearMap, p: IntervalPartition, tol: float = MARKOV_TOL) -> MarkovReport:
    """Report whether every cell lies in one branch and maps onto a union of cells.

    ``cell`` and ``message`` describe the first violation; ``violations``
    lists every offending cell.
    """
    bad, first = [], None
    for i in range(len(p)):
        try:
            _cell_image(m, p, i, tol)
        except MarkovViolationError as exc:
            bad.append(i)
            first = first or exc
    if not bad:
        return MarkovReport(True)
    return MarkovReport(False, first.cell, str(first), tuple(bad))


def transition_matrix(system, p: IntervalPartition | None = None) -> SubstochasticMatrix:
    """Closed-system transition matrix ``p_ij = m(E_i & T^-1 E_j) / m(E_i)``.

    For an affine branch this is ``m(E_j) / m(T E_i)`` on the cells covering
    ``T E_i`` and zero elsewhere. Symbolic models return their stored matrix.
    """
    if isinstance(system, SymbolicMarkovModel):
        return SubstochasticMatrix(system.transition)
    if p is None:
        p = system.base_partition
    lengths = p.lengths
    P = np.zeros((len(p), len(p)))
    for i in range(len(p)):
        ja, jb = _cell_image(system, p, i, MARKOV_TOL)
        covered = lengths[ja:jb]
        # Normalising by the covered length rather than |slope| * m(E_i) keeps
        # row sums at 1 to rounding even on deep refinements.
        P[i, ja:jb] = covered / covered.sum()
    return SubstochasticMatrix(P)


def punch_hole(m: SubstochasticMatrix, i: int | Iterable[int]) -> SubstochasticMatrix:
    """Copy of ``m`` with row(s) ``i`` zeroed (0-based)."""
    rows = (i,) if isinstance(i, (int, np.integer)) else tuple(i)
    for r in rows:
        if not 0 <= r < m.order:
            raise DomainError(f"hole index {r} out of range for order {m.order}")
    P = m.entries.copy()
    P[list(rows), :] = 0.0
    return SubstochasticMatrix(P, m.holes + tuple(int(r) for r in rows))


def refine_symbolic(model: SymbolicMarkovModel, steps: int = 1) -> SymbolicMarkovModel:
    """Block chain on words of length ``steps + 1``.

    State ``(s0, ..., sn)`` moves to ``(s1, ..., sn, t)`` with probability
    ``P[sn, t]`` and carries measure ``mu[s0] * P[s0, s1] * ... * P[s(n-1), sn]``.
    All k**(steps+1) words are kept; forbidden words get zero measure and
    never receive mass.
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    P = model.transition
    k = P.shape[0]
    words = [(s,) for s in range(k)]
    weights = model.state_measure.weights.copy()
    for _ in range(steps):
        words = [w + (t,) for w in words for t in range(k)]
        weights = np.array([weights[idx // k] * P[w[-2], w[-1]] for idx, w in enumerate(words)])
    index = {w: n for n, w in enumerate(words)}
    Q = np.zeros((len(words), len(words)))
    for n, w in enumerate(words):
        for t in range(k):
            Q[n, index[w[1:] + (t,)]] = P[w[-1], t]
    labels = tuple("-".join(model.labels[s] for s in w) for w in words)
    return SymbolicMarkovModel(Q, MeasureVector(weights / weights.sum()),
                               name=f"{model.name}[{steps}]", labels=labels)


def refined_hole(model: SymbolicMarkovModel, steps: int, cell: int) -> list[int]:
    """States of ``refine_symbolic(model, steps)`` whose word starts in ``cell``."""
    k = model.state_count
    span = k ** steps
    return list(range(cell * span, (cell + 1) * span))


def stationary_residual(matrix: SubstochasticMatrix, mu: MeasureVector) -> float:
    if len(mu) != matrix.order:
        raise DimensionError("measure and matrix orders differ")
    return float(np.max(np.abs(mu.weights @ matrix.entries - mu.weights)))
