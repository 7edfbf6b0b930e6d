import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from escape_lab.errors import PartitionError
from escape_lab.partition import (Interval, IntervalPartition, MeasureVector, lebesgue_measure,
                                  validate_partition)


def test_lebesgue_two_cells():
    mu = lebesgue_measure(IntervalPartition([0.0, 0.3, 1.0]))
    np.testing.assert_allclose(mu.weights, [0.3, 0.7], atol=1e-15)


def test_lebesgue_uniform_four():
    np.testing.assert_allclose(lebesgue_measure(IntervalPartition.uniform(4)).weights, [0.25] * 4)


def test_lebesgue_tent_level_two_refinement():
    # breakpoints solve T(x) = 0.1 on each branch: x = 0.1 * 0.1 and 1 - 0.1 * 0.9
    p = IntervalPartition([0.0, 0.01, 0.1, 0.91, 1.0])
    np.testing.assert_allclose(lebesgue_measure(p).weights, [0.01, 0.09, 0.81, 0.09], atol=1e-15)


def test_validate_good():
    assert validate_partition([Interval(0, 0.5), Interval(0.5, 1)]).valid


def test_validate_gap():
    report = validate_partition([(0, 0.4), (0.5, 1)])
    assert not report.valid
    (issue,) = report.issues
    assert (issue.kind, issue.lo, issue.hi) == ("gap", 0.4, 0.5)


def test_validate_overlap():
    report = validate_partition([(0, 0.6), (0.5, 1)])
    (issue,) = report.issues
    assert (issue.kind, issue.lo, issue.hi) == ("overlap", 0.5, 0.6)


def test_validate_bounds_and_short_cells():
    report = validate_partition([(0.1, 0.5), (0.5, 0.5 + 1e-14), (0.5 + 1e-14, 0.9)])
    kinds = sorted(i.kind for i in report.issues)
    assert kinds == ["bounds", "bounds", "short-cell"]


def test_constructor_rejects_invalid():
    with pytest.raises(PartitionError):
        IntervalPartition([0.0, 0.7, 0.5, 1.0])
    with pytest.raises(PartitionError):
        IntervalPartition([0.0, 0.5, 0.5 + 1e-13, 1.0])
    with pytest.raises(PartitionError):
        Interval(0.3, 0.3)


def test_measure_vector_invariants():
    with pytest.raises(PartitionError):
        MeasureVector([0.5, 0.6])
    with pytest.raises(PartitionError):
        MeasureVector([1.5, -0.5])
    assert len(MeasureVector.uniform(8)) == 8


def test_locate_left_wins():
    p = IntervalPartition([0.0, 0.25, 0.5, 1.0])
    assert p.locate(0.25) == 0
    assert p.locate(0.2500001) == 1
    assert p.locate(0.0) == 0 and p.locate(1.0) == 2


def test_json_round_trip():
    p = IntervalPartition([0.0, 1 / 3, 0.5, 2 / 3, 1.0])
    text = p.to_json()
    assert json.loads(text)[1] == 1 / 3
    assert IntervalPartition.from_json(text) == p


def test_values_are_immutable():
    p = IntervalPartition([0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        p.breakpoints[1] = 0.4


@given(st.lists(st.floats(1e-6, 1 - 1e-6), min_size=0, max_size=40))
def test_lebesgue_sums_to_one(points):
    bps = np.unique(np.r_[0.0, points, 1.0])
    if np.min(np.diff(bps)) < 1e-12:
        return
    assert abs(lebesgue_measure(IntervalPartition(bps)).weights.sum() - 1.0) <= 1e-12
