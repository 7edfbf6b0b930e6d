import numpy as np
import pytest

from escape_lab.maps import make_skewed_tent
from escape_lab.transition import refine, transition_matrix


@pytest.fixture(scope="session")
def tent_system():
    """Cached (map, partition, matrix) for a skewed tent map at a refinement level."""
    cache = {}

    def get(x0, levels=0):
        key = (x0, levels)
        if key not in cache:
            m = make_skewed_tent(x0)
            p = refine(m, levels=levels)
            cache[key] = (m, p, transition_matrix(m, p))
        return cache[key]

    return get


def indicator_transition(m, p, samples_per_cell=200_000):
    """Quadrature oracle: m(E_i & T^-1 E_j) / m(E_i) from a midpoint grid."""
    k = len(p)
    P = np.zeros((k, k))
    u = (np.arange(samples_per_cell) + 0.5) / samples_per_cell
    for i, cell in enumerate(p.cells):
        x = cell.lo + u * cell.length
        y = m(x)
        j = np.clip(np.searchsorted(p.breakpoints, y, side="right") - 1, 0, k - 1)
        P[i] = np.bincount(j, minlength=k) / samples_per_cell
    return P


_CRITERIA = {}


@pytest.fixture
def record_criterion():
    """Print and keep one PASS/FAIL line per acceptance criterion."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
