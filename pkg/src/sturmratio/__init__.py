"""Pruefer-phase shooting eigenvalues for -y'' + q(x) y = lambda y and ratio-bound checks."""
from .boundary import BoundaryCondition
from .eigensolver import EigenvalueRecord, bracket, eigenvalues, phase_at, solve_one, solve_range
from .errors import (DomainError, IneligiblePotential, IntegrationError,
                     NegativeSpectrumSuspected, OracleError, ParseError)
from .harness import (VerificationReport, check_cited_bounds, check_theorem1, check_theorem2,
                      check_theorem3, check_theorem4, find_l0, verify)
from .oracle import fd_eigenvalues, refined_eigenvalue, refined_eigenvalues, sturm_count
from .potential import Potential, ShapeReport, classify, load_samples, min_max, parse_family
from .pruefer import PrueferState, eigenfunction_trace, integrate_phase, theta, theta_dot

__version__ = "0.1.0"
