"""Published reference values used by ``--check`` and the acceptance suite."""

import math

TENT_X0 = (0.1, 0.2, 0.3, 0.4, 0.5)
TABLE_K = (4, 8, 16, 32, 64, 128, 256)

# Lower-bound estimate -ln(sum mu_i p_i) for the skewed tent map, by x0 then k.
TENT_LOWER_BOUND = {
    0.1: (0.77922, 0.44239, 0.28375, 0.19638, 0.14384, 0.10949, 0.08598),
    0.2: (0.47400, 0.25981, 0.16685, 0.11452, 0.07286, 0.04757, 0.03175),
    0.3: (0.37517, 0.21720, 0.11717, 0.06234, 0.03491, 0.01987, 0.01149),
    0.4: (0.37047, 0.17868, 0.08023, 0.03931, 0.01990, 0.01022, 0.00529),
    0.5: (0.42387, 0.15808, 0.06928, 0.03297, 0.01604, 0.00792, 0.00393),
}
TENT_TOL = 1e-4

N1 = dict(zip(TABLE_K, (0.28768, 0.13353, 0.06453, 0.03174, 0.01574, 0.00784, 0.00391)))

CAT_EIGENVALUES = (3 - math.sqrt(5),) * 4 + ((1 + math.sqrt(2)) / 2 * (3 - math.sqrt(5)),)
CAT_EIGENVALUE_TOL = 1e-10
CAT_AVERAGE_RHO = 0.2494
CAT_LOWER_BOUND = 0.2476
CAT_TOL = 5e-4

TRANSFER_TOL = 1e-12
TABLE_DIGITS = 5


def truncate(x, digits=TABLE_DIGITS):
    """Cut ``x`` to ``digits`` decimals, the way the tabulated values were printed."""
    scale = 10**digits
    return math.floor(x * scale + 1e-9) / scale


def tent_reference(x0, k):
    """Tabulated value for (x0, k), or None when the pair is not tabulated."""
    for key, row in TENT_LOWER_BOUND.items():
        if math.isclose(key, x0, abs_tol=1e-12) and k in TABLE_K:
            return row[TABLE_K.index(k)]
    return None
