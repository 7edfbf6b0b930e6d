"""Perron eigenpairs of nonnegative matrices and support-graph diagnostics."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError
from .transition import SubstochasticMatrix

DEFAULT_TOL = 1e-12
MAX_ITER = 10**6
COLLAPSE_MASS = 1e-300
_CHECK_EVERY = 25
_WARMUP = 200
# Projected power iterations beyond max(_MIN_BUDGET, _BUDGET_PER_STATE * k)
# cost more than one dense solve at the orders used here.
_MIN_BUDGET = 2000
_BUDGET_PER_STATE = 20


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Leading eigenvalue with a left eigenvector ``v M = eigenvalue * v``.

    ``method`` is ``"power"``, ``"dense"`` or ``"collapse"`` (nilpotent
    support, eigenvalue zero).
    """

    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int
    residual: float
    method: str = "power"


def _as_array(m) -> np.ndarray:
    return m.entries if isinstance(m, SubstochasticMatrix) else np.asarray(m, dtype=float)


def dense_spectral_radius(m) -> float:
    """Spectral radius from the full spectrum (reference path for cross-checks)."""
    return float(np.max(np.abs(np.linalg.eigvals(_as_array(m)))))


def _dense_eigenpair(M: np.ndarray, tol: float) -> SpectralResult:
    vals, vecs = np.linalg.eig(M.T)
    scale = max(1.0, float(np.max(np.abs(vals))))
    real = np.abs(vals.imag) <= 1e-9 * scale
    candidates = np.flatnonzero(real & (vals.real >= -1e-12 * scale))
    if candidates.size == 0:
        raise ConvergenceError("dense solve found no real nonnegative eigenvalue")
    best = candidates[np.argmax(vals.real[candidates])]
    lam = max(float(vals.real[best]), 0.0)
    v = vecs[:, best].real
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    if v.sum() <= 0:
        raise ConvergenceError("dense solve gave no nonnegative eigenvector")
    v = v / v.sum()
    residual = float(np.max(np.abs(v @ M - lam * v)))
    if residual > tol:
        raise ConvergenceError(f"dense eigenvector residual {residual:.3e} exceeds {tol:.1e}",
                               residual=residual)
    return SpectralResult(lam, v, 0, residual, "dense")


def leading_eigenvalue(m, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> SpectralResult:
    """Spectral radius and nonnegative left eigenvector of a nonnegative matrix.

    Power iteration ``v <- v M / sum(v M)`` from the uniform vector, stopping
    when ``max|v M - lam v| <= tol * min(1, lam)``. When the residual stagnates (periodic
    support, tiny spectral gap, defective leading eigenvalue) or the projected
    iteration count is too large, a dense eigensolve is used instead.

    Raises
    ------
    ConvergenceError
        If neither route reaches ``tol``; carries the last residual.
    """
    M = _as_array(m)
    k = M.shape[0]
    v = np.full(k, 1.0 / k)
    residual = math.inf
    budget = max(_MIN_BUDGET, _BUDGET_PER_STATE * k)
    history = []
    it = 0
    while it < max_iter:
        w = v @ M
        lam = w.sum()
        it += 1
        if lam < COLLAPSE_MASS:
            return SpectralResult(0.0, v, it, float(np.max(np.abs(w))), "collapse")
        if it % _CHECK_EVERY == 0 or it <= 3:
            residual = float(np.max(np.abs(w - lam * v)))
            # Relative for small eigenvalues, where an absolute residual
            # below tol says nothing about lam.
            if residual <= tol * min(1.0, lam):
                return SpectralResult(float(lam), v, it, residual, "power")
            if it % _CHECK_EVERY == 0:
                history.append(residual)
            if it >= _WARMUP and len(history) >= 4:
                ratio = (history[-1] / history[-4]) ** (1.0 / (3 * _CHECK_EVERY))
                if not ratio < 1.0 - 1e-9:
                    break
                needed = math.log(tol * min(1.0, lam) / residual) / math.log(ratio)
                if needed > budget or it + needed > max_iter:
                    break
        v = w / lam
    try:
        result = _dense_eigenpair(M, max(tol, 1e-13))
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"power iteration stalled at residual {residual:.3e} and {exc}",
            residual=min(residual, exc.residual if not math.isnan(exc.residual) else math.inf),
        ) from exc
    return SpectralResult(result.eigenvalue, result.eigenvector, it, result.residual, "dense")


@dataclass(frozen=True)
class ChainStructure:
    """Support-graph diagnostics of a nonnegative matrix.

    ``classes`` are the recurrent communicating classes (strongly connected
    components carrying at least one cycle). ``strongly_connected`` holds
    when there is exactly one; ``period`` is the gcd of cycle lengths in the
    dominant class (the one with the largest spectral radius).
    """

    strongly_connected: bool
    period: int
    classes: tuple[tuple[int, ...], ...]
    dominant_class: tuple[int, ...]
    transient: tuple[int, ...]

    @property
    def aperiodic(self) -> bool:
        return self.period == 1


def _class_period(adj: np.ndarray, members: list[int]) -> int:
    inside = set(members)
    level = {members[0]: 0}
    queue = deque([members[0]])
    g = 0
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in inside:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) or 1


def chain_structure(m) -> ChainStructure:
    M = _as_array(m)
    adj = M > 0
    n_comp, labels = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    classes, transient = [], []
    for c in range(n_comp):
        members = [int(i) for i in np.flatnonzero(labels == c)]
        sub = adj[np.ix_(members, members)]
        if len(members) > 1 or sub[0, 0]:
            classes.append(members)
        else:
            transient.extend(members)
    if not classes:
        return ChainStructure(False, 1, (), (), tuple(sorted(transient)))
    if len(classes) == 1:
        dominant = classes[0]
    else:
        radii = [dense_spectral_radius(M[np.ix_(c, c)]) for c in classes]
        dominant = classes[int(np.argmax(radii))]
    return ChainStructure(
        strongly_connected=len(classes) == 1,
        period=_class_period(adj, dominant),
        classes=tuple(tuple(c) for c in classes),
        dominant_class=tuple(dominant),
        transient=tuple(sorted(transient)),
    )
