import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import indicator_transition
from escape_lab.errors import DomainError, MarkovViolationError, RefinementDegenerateError
from escape_lab.maps import make_cat_map_model, make_doubling, make_skewed_tent
from escape_lab.partition import IntervalPartition
from escape_lab.spectral import leading_eigenvalue
from escape_lab.transition import (SubstochasticMatrix, check_markov, levels_for_cells,
                                   punch_hole, refine, refine_symbolic, refined_hole,
                                   transition_matrix)


def test_refine_symmetric_tent():
    p = refine(make_skewed_tent(0.5), levels=1)
    np.testing.assert_array_equal(p.breakpoints, [0, 0.25, 0.5, 0.75, 1])


def test_refine_skewed_tent():
    p = refine(make_skewed_tent(0.1), levels=1)
    np.testing.assert_allclose(p.breakpoints, [0, 0.01, 0.1, 0.91, 1], atol=1e-15)


@pytest.mark.parametrize("x0", [0.1, 0.2, 0.3, 0.4, 0.5])
def test_refine_cell_counts(x0):
    m = make_skewed_tent(x0)
    assert [len(refine(m, levels=n)) for n in range(8)] == [2, 4, 8, 16, 32, 64, 128, 256]


def test_levels_for_cells():
    assert [levels_for_cells(k) for k in (2, 4, 256)] == [0, 1, 7]
    with pytest.raises(DomainError):
        levels_for_cells(12)


def test_refine_degenerate():
    with pytest.raises(RefinementDegenerateError):
        refine(make_skewed_tent(1e-4), levels=3)


def test_transition_tent_03_against_quadrature():
    m = make_skewed_tent(0.3)
    P = transition_matrix(m, m.base_partition).entries
    np.testing.assert_allclose(indicator_transition(m, m.base_partition), [[0.3, 0.7], [0.3, 0.7]], atol=1e-5)
    np.testing.assert_allclose(P, [[0.3, 0.7], [0.3, 0.7]], atol=1e-15)


@pytest.mark.parametrize("x0,levels", [(0.2, 1), (0.3, 2), (0.45, 3)])
def test_transition_refined_against_quadrature(x0, levels):
    m = make_skewed_tent(x0)
    p = refine(m, levels=levels)
    np.testing.assert_allclose(transition_matrix(m, p).entries, indicator_transition(m, p), atol=1e-4)


def test_transition_doubling_against_quadrature():
    m = make_doubling(0.35)
    p = refine(m, levels=2)
    np.testing.assert_allclose(transition_matrix(m, p).entries, indicator_transition(m, p), atol=1e-4)


def test_transition_symmetric_tent():
    m = make_skewed_tent(0.5)
    np.testing.assert_array_equal(transition_matrix(m).entries, [[0.5, 0.5], [0.5, 0.5]])


def test_transition_closed_form_slope_formula():
    # p_ij = m(E_j) / (|s| m(E_i)) on the covered cells
    m = make_skewed_tent(0.3)
    p = refine(m, levels=2)
    P = transition_matrix(m, p).entries
    lengths = p.lengths
    for i, cell in enumerate(p.cells):
        s = abs(m.branches[int(m.branch_index(0.5 * (cell.lo + cell.hi)))].slope)
        cols = np.flatnonzero(P[i])
        np.testing.assert_allclose(P[i, cols], lengths[cols] / (s * lengths[i]), rtol=1e-12)


def test_symbolic_model_returns_stored_matrix():
    model = make_cat_map_model()
    np.testing.assert_array_equal(transition_matrix(model).entries, model.transition)


def test_transition_rejects_non_markov():
    with pytest.raises(MarkovViolationError) as info:
        transition_matrix(make_skewed_tent(0.3), IntervalPartition.uniform(3))
    assert info.value.cell == 0


def test_check_markov():
    m = make_skewed_tent(0.3)
    assert check_markov(m, m.base_partition)
    report = check_markov(m, IntervalPartition.uniform(3))
    assert not report
    # cell 0 straddles x0; the middle cell's image [0.476, 0.952] ends inside cells
    assert report.violations == (0, 1, 2)
    assert 1 in report.violations


def test_punch_hole():
    P = SubstochasticMatrix([[0.3, 0.7], [0.3, 0.7]])
    Q = punch_hole(P, 0)
    np.testing.assert_array_equal(Q.entries, [[0, 0], [0.3, 0.7]])
    assert Q.hole_index == 0
    again = punch_hole(Q, 0)
    np.testing.assert_array_equal(again.entries, Q.entries)
    assert again.holes == (0,)
    np.testing.assert_array_equal(P.entries, [[0.3, 0.7], [0.3, 0.7]])
    with pytest.raises(DomainError):
        punch_hole(P, 2)


def test_punch_cat_row_five():
    T0 = transition_matrix(make_cat_map_model())
    T5 = punch_hole(T0, 4)
    assert np.all(T5.entries[4] == 0)
    np.testing.assert_array_equal(T5.entries[:4], T0.entries[:4])


def test_substochastic_invariants():
    with pytest.raises(DomainError):
        SubstochasticMatrix([[0.6, 0.6], [0, 0]])
    with pytest.raises(DomainError):
        SubstochasticMatrix([[-0.1, 0.5], [0, 0]])
    with pytest.raises(DomainError):
        SubstochasticMatrix([[0.5, 0.5], [0, 1]], holes=(0,))


def test_csv_round_trip():
    m = make_skewed_tent(0.37)
    P = transition_matrix(m, refine(m, levels=3))
    back = SubstochasticMatrix.from_csv(P.to_csv())
    np.testing.assert_array_equal(back.entries, P.entries)


@settings(max_examples=40, deadline=None)
@given(x0=st.floats(0.05, 0.95), levels=st.integers(0, 5), doubling=st.booleans())
def test_refinement_properties(x0, levels, doubling):
    m = (make_doubling if doubling else make_skewed_tent)(x0)
    p = refine(m, levels=levels)
    assert check_markov(m, p)
    assert len(p) == 2 ** (levels + 1)
    # nested
    finer = refine(m, levels=levels + 1)
    assert np.all(np.min(np.abs(finer.breakpoints[:, None] - p.breakpoints[None, :]), axis=0) == 0)
    P = transition_matrix(m, p).entries
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)
    # support matches branch covering
    for i, cell in enumerate(p.cells):
        branch = m.branches[int(m.branch_index(0.5 * (cell.lo + cell.hi)))]
        a, b = sorted((branch(cell.lo), branch(cell.hi)))
        mids = 0.5 * (p.breakpoints[:-1] + p.breakpoints[1:])
        np.testing.assert_array_equal(P[i] > 0, (mids > a) & (mids < b))


def test_symbolic_refinement_shape_and_measure():
    model = make_cat_map_model()
    fine = refine_symbolic(model, 1)
    assert fine.state_count == 25
    mu = fine.state_measure.weights
    np.testing.assert_allclose(mu @ fine.transition, mu, atol=1e-15)
    # coarse-graining recovers the original measure
    np.testing.assert_allclose(mu.reshape(5, 5).sum(axis=1), model.state_measure.weights, atol=1e-15)
    assert refined_hole(model, 1, 2) == list(range(10, 15))


@pytest.mark.parametrize("hole", range(5))
def test_cat_refinement_invariance(hole):
    model = make_cat_map_model()
    coarse = leading_eigenvalue(punch_hole(transition_matrix(model), hole)).eigenvalue
    fine_model = refine_symbolic(model, 1)
    fine = leading_eigenvalue(punch_hole(transition_matrix(fine_model), refined_hole(model, 1, hole))).eigenvalue
    assert abs(fine - coarse) <= 1e-10
