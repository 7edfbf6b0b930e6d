"""Assemble (matrix, measure) pairs for each supported system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .maps import (LOGISTIC_CONJUGACY, PiecewiseLinearMap, build_map, load_map_spec,
                   make_cat_map_model, make_logistic_partition)
from .partition import IntervalPartition, MeasureVector, lebesgue_measure
from .transition import SubstochasticMatrix, refine, refine_symbolic, transition_matrix


@dataclass(frozen=True, eq=False)
class System:
    label: str
    matrix: SubstochasticMatrix
    measure: MeasureVector
    partition: IntervalPartition | None = None
    map: PiecewiseLinearMap | None = None


def interval_system(m: PiecewiseLinearMap, levels: int) -> System:
    p = refine(m, levels=levels)
    return System(f"{m.name} k={len(p)}", transition_matrix(m, p), lebesgue_measure(p), p, m)


def cat_system(steps: int = 0) -> System:
    model = make_cat_map_model()
    if steps:
        model = refine_symbolic(model, steps)
    return System(f"cat k={model.state_count}", transition_matrix(model), model.state_measure)


def logistic_system(n: int) -> System:
    """Logistic map on the sine-squared image of the dyadic partition.

    The transition matrix is the symmetric tent map's on 2**n dyadic cells,
    since the conjugacy carries one partition onto the other.
    """
    partition, mu = make_logistic_partition(n)
    tent = build_map({"kind": "logistic"})
    tent_partition = refine(tent, levels=n - 1)
    mapped = LOGISTIC_CONJUGACY.forward(tent_partition.breakpoints)
    if np.max(np.abs(mapped - partition.breakpoints)) > 1e-12:
        raise DomainError("logistic partition is not the conjugate image of the tent partition")
    return System(f"logistic k={len(partition)}", transition_matrix(tent, tent_partition), mu,
                  partition, None)


def system_from_spec(spec) -> System:
    spec = load_map_spec(spec)
    if spec["kind"] == "cat":
        return cat_system(spec["level"])
    if spec["kind"] == "logistic":
        return logistic_system(spec["level"])
    return interval_system(build_map(spec), spec["level"])
