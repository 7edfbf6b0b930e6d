"""Escape rates of open chaotic maps with Markov-partition holes."""

from .errors import (ConvergenceError, DimensionError, DomainError, EscapeLabError,
                     InsufficientDataError, MarkovViolationError, PartitionError,
                     RefinementDegenerateError)
from .estimators import (EstimateReport, HoleRate, average_escape_rate, build_report,
                         escape_rate_from_eigenvalue, lower_bound_estimate, naive_n1, naive_n2,
                         per_hole_rates, quadratic_bound, summarize)
from .maps import (LOGISTIC_CONJUGACY, Branch, Conjugacy, PiecewiseLinearMap, SymbolicMarkovModel,
                   apply_map, load_map_spec, make_cat_map_model, make_doubling,
                   make_logistic_partition, make_skewed_tent)
from .montecarlo import RateFit, SurvivalSeries, fit_escape_rate, simulate_survival
from .partition import (Interval, IntervalPartition, MeasureVector, lebesgue_measure,
                        validate_partition)
from .spectral import ChainStructure, SpectralResult, chain_structure, leading_eigenvalue
from .systems import System, cat_system, interval_system, logistic_system, system_from_spec
from .transition import (SubstochasticMatrix, check_markov, punch_hole, refine, refine_symbolic,
                         transition_matrix)

__version__ = "0.1.0"
