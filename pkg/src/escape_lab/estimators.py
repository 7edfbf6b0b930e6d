"""Escape-rate estimators built from per-hole leading eigenvalues.

Every quantity is weighted by the closed system's invariant measure ``mu``:

* ``average_escape_rate``   sum_i mu_i * rho_i
* ``lower_bound_estimate``  -ln(sum_i mu_i * p_i), never above the average
  by convexity of -ln
* ``naive_n1``              -ln(1 - 1/k)
* ``naive_n2``              -sum_i h_i ln(1 - h_i), never below N1
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._workers import ordered_map
from .errors import ConvergenceError, DimensionError, DomainError
from .partition import MeasureVector
from .spectral import DEFAULT_TOL, chain_structure, leading_eigenvalue
from .transition import SubstochasticMatrix, punch_hole

VERDICT_SLACK = 1e-12
_EIG_SLACK = 1e-12


@dataclass(frozen=True)
class HoleRate:
    """Survival factor ``p`` and escape rate ``rho`` for one hole (0-based index).

    ``strongly_connected`` and ``period`` describe the hole-punched chain and
    are None when diagnostics were skipped.
    """

    hole_index: int
    p: float
    rho: float
    strongly_connected: bool | None = None
    period: int | None = None

    @classmethod
    def from_p(cls, hole_index: int, p: float, **diag) -> "HoleRate":
        return cls(hole_index, float(p), escape_rate_from_eigenvalue(p), **diag)


def escape_rate_from_eigenvalue(lam: float) -> float:
    """``-ln(lam)``; infinite when ``lam`` is zero."""
    if not -_EIG_SLACK <= lam <= 1.0 + _EIG_SLACK:
        raise DomainError(f"eigenvalue {lam} outside [0, 1]")
    lam = min(max(lam, 0.0), 1.0)
    if lam == 0.0:
        return math.inf
    return -math.log(lam) if lam < 1.0 else 0.0


def per_hole_rates(matrix: SubstochasticMatrix, tol: float = DEFAULT_TOL,
                   workers: int | None = None, diagnose: bool = True) -> list[HoleRate]:
    """Punch each cell in turn and record the leading eigenvalue of what remains."""
    if matrix.holes or not matrix.is_stochastic():
        raise DomainError("per-hole rates need the closed (stochastic) matrix")

    def one(i):
        open_matrix = punch_hole(matrix, i)
        try:
            result = leading_eigenvalue(open_matrix, tol)
        except ConvergenceError as exc:
            exc.hole_index = i
            raise
        diag = {}
        if diagnose:
            structure = chain_structure(open_matrix)
            diag = {"strongly_connected": bool(structure.strongly_connected),
                    "period": int(structure.period)}
        return HoleRate.from_p(i, result.eigenvalue, **diag)

    return ordered_map(one, range(matrix.order), workers)


def _weights(mu) -> np.ndarray:
    return mu.weights if isinstance(mu, MeasureVector) else np.asarray(mu, dtype=float)


def _check_lengths(w, rates):
    if len(w) != len(rates):
        raise DimensionError(f"{len(w)} weights but {len(rates)} hole rates")


def _p_values(rates) -> np.ndarray:
    return np.array([r.p if isinstance(r, HoleRate) else float(r) for r in rates])


def average_escape_rate(mu, rates: Sequence[HoleRate]) -> float:
    w = _weights(mu)
    _check_lengths(w, rates)
    total = 0.0
    for weight, rate in zip(w, rates):
        if weight == 0.0:
            continue
        if math.isinf(rate.rho):
            return math.inf
        total += weight * rate.rho
    return total


def lower_bound_estimate(mu, rates) -> float:
    """``-ln(sum mu_i p_i)``; ``rates`` may be HoleRates or bare p values."""
    w = _weights(mu)
    _check_lengths(w, rates)
    s = float(w @ _p_values(rates))
    return -math.log(s) if s > 0.0 else math.inf


def naive_n1(k: int) -> float:
    if k < 2:
        raise DomainError(f"k={k}: N1 needs at least two cells")
    return -math.log1p(-1.0 / k)


def naive_n2(mu) -> float:
    h = _weights(mu)
    if np.any(h >= 1.0):
        return math.inf
    return float(-np.sum(h * np.log1p(-h)))


def quadratic_bound(mu) -> float:
    """``-ln(1 - sum h_i^2)``, the quantity sandwiched between N1 and N2."""
    h = _weights(mu)
    s = 1.0 - float(np.sum(h * h))
    return -math.log(s) if s > 0.0 else math.inf


@dataclass(frozen=True)
class EstimateReport:
    hole_rates: tuple[HoleRate, ...]
    measure: tuple[float, ...]
    average_rho: float
    lower_bound: float
    n1: float
    n2: float
    jensen_holds: bool
    n2_ge_n1_holds: bool
    label: str = ""
    notes: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.hole_rates)

    @property
    def p(self) -> np.ndarray:
        return np.array([r.p for r in self.hole_rates])

    @property
    def rho(self) -> np.ndarray:
        return np.array([r.rho for r in self.hole_rates])

    @property
    def verdicts_hold(self) -> bool:
        return self.jensen_holds and self.n2_ge_n1_holds

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "k": self.k,
            "average_rho": _num(self.average_rho),
            "lower_bound": _num(self.lower_bound),
            "n1": _num(self.n1),
            "n2": _num(self.n2),
            "jensen_holds": self.jensen_holds,
            "n2_ge_n1_holds": self.n2_ge_n1_holds,
            "notes": list(self.notes),
            "holes": [
                {
                    "hole": r.hole_index + 1,
                    "mu": _num(m),
                    "p": _num(r.p),
                    "rho": _num(r.rho),
                    "strongly_connected": r.strongly_connected,
                    "period": r.period,
                }
                for r, m in zip(self.hole_rates, self.measure)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EstimateReport":
        holes = d["holes"]
        rates = tuple(HoleRate(h["hole"] - 1, _unnum(h["p"]), _unnum(h["rho"]),
                               h.get("strongly_connected"), h.get("period")) for h in holes)
        return cls(
            hole_rates=rates,
            measure=tuple(_unnum(h["mu"]) for h in holes),
            average_rho=_unnum(d["average_rho"]),
            lower_bound=_unnum(d["lower_bound"]),
            n1=_unnum(d["n1"]),
            n2=_unnum(d["n2"]),
            jensen_holds=bool(d["jensen_holds"]),
            n2_ge_n1_holds=bool(d["n2_ge_n1_holds"]),
            label=d.get("label", ""),
            notes=tuple(d.get("notes", ())),
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "EstimateReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Long-format CSV: one row per hole, then one row per summary value."""
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["hole", "mu", "p", "rho", "strongly_connected", "period"])
        for r, m in zip(self.hole_rates, self.measure):
            out.writerow([r.hole_index + 1, _fmt(m), _fmt(r.p), _fmt(r.rho),
                          "" if r.strongly_connected is None else int(r.strongly_connected),
                          "" if r.period is None else r.period])
        for name in ("average_rho", "lower_bound", "n1", "n2"):
            out.writerow([name, _fmt(getattr(self, name)), "", "", "", ""])
        for name in ("jensen_holds", "n2_ge_n1_holds"):
            out.writerow([name, int(getattr(self, name)), "", "", "", ""])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "") -> "EstimateReport":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        rates, measure, summary = [], [], {}
        for row in rows:
            if row[0].isdigit():
                rates.append(HoleRate(int(row[0]) - 1, float(row[2]), float(row[3]),
                                      None if row[4] == "" else bool(int(row[4])),
                                      None if row[5] == "" else int(row[5])))
                measure.append(float(row[1]))
            else:
                summary[row[0]] = row[1]
        return cls(tuple(rates), tuple(measure),
                   float(summary["average_rho"]), float(summary["lower_bound"]),
                   float(summary["n1"]), float(summary["n2"]),
                   bool(int(summary["jensen_holds"])), bool(int(summary["n2_ge_n1_holds"])),
                   label=label)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.17g}"


def _num(x: float):
    return "inf" if math.isinf(x) else float(_fmt(x))


def _unnum(x) -> float:
    return math.inf if x == "inf" else float(x)


def summarize(mu, rates: Sequence[HoleRate], label: str = "", notes=()) -> EstimateReport:
    """Assemble a report from precomputed hole rates."""
    w = _weights(mu)
    _check_lengths(w, rates)
    avg = average_escape_rate(w, rates)
    lb = lower_bound_estimate(w, rates)
    n1 = naive_n1(len(w))
    n2 = naive_n2(w)
    notes = list(notes)
    if any(r.strongly_connected is False for r in rates):
        bad = [r.hole_index + 1 for r in rates if r.strongly_connected is False]
        notes.append(f"hole-punched chain not irreducible for holes {bad}")
    if any(r.period not in (None, 1) for r in rates):
        bad = [r.hole_index + 1 for r in rates if r.period not in (None, 1)]
        notes.append(f"hole-punched chain periodic for holes {bad}")
    return EstimateReport(
        hole_rates=tuple(rates),
        measure=tuple(float(x) for x in w),
        average_rho=avg,
        lower_bound=lb,
        n1=n1,
        n2=n2,
        jensen_holds=bool(avg >= lb - VERDICT_SLACK),
        n2_ge_n1_holds=bool(n2 >= n1 - VERDICT_SLACK),
        label=label,
        notes=tuple(notes),
    )


def build_report(matrix: SubstochasticMatrix, mu: MeasureVector, tol: float = DEFAULT_TOL,
                 label: str = "", workers: int | None = None, diagnose: bool = True) -> EstimateReport:
    if len(mu) != matrix.order:
        raise DimensionError(f"measure has {len(mu)} cells, matrix has order {matrix.order}")
    rates = per_hole_rates(matrix, tol, workers=workers, diagnose=diagnose)
    return summarize(mu, rates, label=label)
