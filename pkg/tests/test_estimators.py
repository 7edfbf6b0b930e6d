import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from escape_lab.errors import DimensionError, DomainError
from escape_lab.estimators import (EstimateReport, HoleRate, average_escape_rate, build_report,
                                   escape_rate_from_eigenvalue, lower_bound_estimate, naive_n1,
                                   naive_n2, per_hole_rates, quadratic_bound, summarize)
from escape_lab.maps import cat_map_eigenvalues, make_cat_map_model
from escape_lab.partition import MeasureVector
from escape_lab.systems import cat_system, interval_system, logistic_system
from escape_lab.maps import make_skewed_tent
from escape_lab.transition import punch_hole


def test_rate_from_eigenvalue():
    assert escape_rate_from_eigenvalue(1.0) == 0.0
    assert escape_rate_from_eigenvalue(0.9) == pytest.approx(0.1053605, abs=1e-7)
    assert escape_rate_from_eigenvalue(0.0) == math.inf
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            escape_rate_from_eigenvalue(bad)


def test_per_hole_tent_03(tent_system):
    _, _, P = tent_system(0.3)
    rates = per_hole_rates(P)
    np.testing.assert_allclose([r.p for r in rates], [0.7, 0.3], atol=1e-12)
    np.testing.assert_allclose([r.rho for r in rates], [0.356675, 1.203973], atol=1e-6)
    assert [r.hole_index for r in rates] == [0, 1]


def test_per_hole_cat():
    model = make_cat_map_model()
    from escape_lab.transition import transition_matrix
    rates = per_hole_rates(transition_matrix(model))
    np.testing.assert_allclose([r.p for r in rates], cat_map_eigenvalues(), atol=1e-12)


def test_per_hole_symmetric(tent_system):
    rates = per_hole_rates(tent_system(0.5)[2])
    assert [r.p for r in rates] == pytest.approx([0.5, 0.5], abs=1e-15)


def test_per_hole_requires_closed_matrix(tent_system):
    with pytest.raises(DomainError):
        per_hole_rates(punch_hole(tent_system(0.3)[2], 0))


def test_average_rate_values(tent_system):
    _, p, P = tent_system(0.5)
    assert average_escape_rate(p.lengths, per_hole_rates(P)) == pytest.approx(math.log(2), abs=1e-15)
    _, p, P = tent_system(0.3)
    expected = -0.3 * math.log(0.7) - 0.7 * math.log(0.3)
    assert average_escape_rate(p.lengths, per_hole_rates(P)) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.949784, abs=1e-6)


def test_average_rate_infinite_and_zero_weight():
    rates = [HoleRate.from_p(0, 0.0), HoleRate.from_p(1, 0.5)]
    assert average_escape_rate([0.5, 0.5], rates) == math.inf
    assert average_escape_rate([0.0, 1.0], rates) == pytest.approx(math.log(2))
    assert lower_bound_estimate([0.5, 0.5], rates) == pytest.approx(-math.log(0.25))
    assert lower_bound_estimate([1.0, 0.0], rates) == math.inf


def test_length_mismatch():
    with pytest.raises(DimensionError):
        average_escape_rate([1.0], [HoleRate.from_p(0, 0.5), HoleRate.from_p(1, 0.5)])
    with pytest.raises(DimensionError):
        lower_bound_estimate([0.5, 0.5], [0.3])


@pytest.mark.parametrize("x0", [0.1, 0.3, 0.5, 0.77])
def test_lower_bound_two_cell_closed_form(tent_system, x0):
    _, p, P = tent_system(x0)
    lb = lower_bound_estimate(p.lengths, per_hole_rates(P))
    assert lb == pytest.approx(-math.log(2 * x0 * (1 - x0)), abs=1e-12)


def test_lower_bound_tent_03(tent_system):
    _, p, P = tent_system(0.3)
    assert lower_bound_estimate(p.lengths, per_hole_rates(P)) == pytest.approx(0.867501, abs=1e-6)


def test_cat_average_and_bound():
    s = cat_system()
    report = build_report(s.matrix, s.measure)
    assert report.average_rho == pytest.approx(0.2494, abs=5e-4)
    assert report.lower_bound == pytest.approx(0.2476, abs=5e-4)
    assert report.jensen_holds


def test_n1_values():
    assert naive_n1(2) == pytest.approx(math.log(2), abs=1e-15)
    assert math.floor(naive_n1(4) * 1e5) / 1e5 == 0.28768
    assert math.floor(naive_n1(256) * 1e5) / 1e5 == 0.00391
    with pytest.raises(DomainError):
        naive_n1(1)


def test_n2_values():
    assert naive_n2(MeasureVector.uniform(4)) == pytest.approx(naive_n1(4), abs=1e-15)
    assert naive_n2([0.3, 0.7]) == pytest.approx(-0.3 * math.log(0.7) - 0.7 * math.log(0.3), abs=1e-15)
    assert naive_n2(MeasureVector.uniform(2)) == pytest.approx(math.log(2), abs=1e-15)
    assert naive_n2([1.0, 0.0]) == math.inf


@pytest.mark.parametrize("x0,levels,expected", [(0.5, 2, 0.15808), (0.2, 5, 0.07286)])
def test_report_table_cells(x0, levels, expected):
    s = interval_system(make_skewed_tent(x0), levels)
    assert build_report(s.matrix, s.measure).lower_bound == pytest.approx(expected, abs=1e-4)


def test_report_dimension_check(tent_system):
    with pytest.raises(DimensionError):
        build_report(tent_system(0.3)[2], MeasureVector.uniform(3))


def test_jensen_equality_symmetric(tent_system):
    _, p, P = tent_system(0.5)
    report = build_report(P, MeasureVector(p.lengths))
    assert abs(report.average_rho - report.lower_bound) <= 1e-12


def test_report_flags_reducible_holes():
    report = build_report(cat_system().matrix, cat_system().measure)
    assert any("not irreducible" in note for note in report.notes)
    assert report.hole_rates[1].strongly_connected is False


probability = st.lists(st.floats(0.0, 1.0), min_size=2, max_size=64).filter(
    lambda w: sum(w) > 1e-3).map(lambda w: np.array(w) / np.sum(w))


@settings(max_examples=300, deadline=None)
@given(probability, st.data())
def test_jensen_and_naive_chain(h, data):
    ps = np.array(data.draw(st.lists(st.floats(1e-6, 1.0), min_size=len(h), max_size=len(h))))
    rates = [HoleRate.from_p(i, p) for i, p in enumerate(ps)]
    assert average_escape_rate(h, rates) >= lower_bound_estimate(h, rates) - 1e-12
    assert naive_n2(h) >= quadratic_bound(h) - 1e-12
    assert quadratic_bound(h) >= naive_n1(len(h)) - 1e-12


def test_report_json_round_trip():
    s = interval_system(make_skewed_tent(0.37), 2)
    report = build_report(s.matrix, s.measure, label="tent")
    back = EstimateReport.from_json(report.to_json())
    assert back == report


def test_report_csv_round_trip():
    s = cat_system()
    report = build_report(s.matrix, s.measure)
    back = EstimateReport.from_csv(report.to_csv())
    assert back.hole_rates == report.hole_rates
    assert back.measure == report.measure
    assert (back.average_rho, back.lower_bound, back.n1, back.n2) == (
        report.average_rho, report.lower_bound, report.n1, report.n2)


def test_report_json_infinity():
    report = summarize([0.5, 0.5], [HoleRate.from_p(0, 0.0), HoleRate.from_p(1, 0.5)])
    doc = report.to_dict()
    assert doc["average_rho"] == "inf" and doc["holes"][0]["rho"] == "inf"
    assert EstimateReport.from_json(report.to_json()) == report


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_logistic_equals_tent(n):
    log = logistic_system(n)
    tent = interval_system(make_skewed_tent(0.5), n - 1)
    a = build_report(log.matrix, log.measure)
    b = build_report(tent.matrix, tent.measure)
    for q in ("average_rho", "lower_bound", "n1", "n2"):
        assert abs(getattr(a, q) - getattr(b, q)) <= 1e-12
    np.testing.assert_allclose(a.p, b.p, atol=1e-12, rtol=0)
