"""Eigenvalues by shooting on the terminal Pruefer phase.

The n-th Dirichlet eigenvalue z_n^2 is the root of phi(ell, z) = n pi; the
Dirichlet-Neumann one solves phi(ell, z) = (n - 1/2) pi, since y'(ell) = 0
means cos phi(ell, z) = 0.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

from .boundary import BoundaryCondition
from .errors import DomainError, IntegrationError, NegativeSpectrumSuspected, OracleError
from .oracle import refined_eigenvalues
from .potential import Potential, min_max
from .pruefer import DEFAULT_REL_TOL, integrate_phase

DEFAULT_Z_TOL = 1e-11
RESIDUAL_TOL = 1e-9
MAX_EXPANSIONS = 60
EPS = sys.float_info.epsilon
# below this fraction of the upper bracket lambda the phase ODE turns stiff;
# an eigenvalue that small is treated as nonpositive
MIN_LAMBDA_FRACTION = 1e-6
DEFAULT_ORACLE_N = 20_000


@dataclass(frozen=True)
class EigenvalueRecord:
    n: int
    z_n: Optional[float]
    lambda_n: float
    residual: Optional[float]
    method: str  # "shooting" or "oracle"


def _check_ell(p: Potential, ell: Optional[float]) -> float:
    ell = p.domain_end if ell is None else float(ell)
    if not 0.0 < ell <= p.domain_end:
        raise DomainError(f"ell must lie in (0, {p.domain_end}], got {ell}")
    return ell


def phase_at(p: Potential, z: float, ell: Optional[float] = None,
             rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Terminal phase phi(ell, z)."""
    return integrate_phase(p, z, _check_ell(p, ell), rel_tol).phi


def bracket(p: Potential, n: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
            ell: Optional[float] = None, rel_tol: float = DEFAULT_REL_TOL):
    """(z_lo, z_hi) with phi(ell, z_lo) < target < phi(ell, z_hi).

    Starts from the comparison bounds free_n + min q <= lambda_n <= free_n + max q
    and widens geometrically on the lambda scale until the phase check passes.
    """
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    ell = _check_ell(p, ell)
    target = bc.target_phase(n)
    q_min, q_max, _, _ = min_max(p, 0.0, ell)
    free = bc.free_eigenvalue(n, ell)
    pad = 1e-6 * (free + abs(q_min) + abs(q_max))
    lam_lo, lam_hi = free + q_min - pad, free + q_max + pad
    if lam_hi <= 0.0:
        raise NegativeSpectrumSuspected(
            f"lambda_{n} <= {lam_hi:.6g} for {p.descriptor}; use the oracle")

    for _ in range(MAX_EXPANSIONS):
        if phase_at(p, math.sqrt(lam_hi), ell, rel_tol) > target:
            break
        lam_hi *= 2.0
    else:
        raise NegativeSpectrumSuspected(f"no upper bracket for lambda_{n} of {p.descriptor}")

    floor = MIN_LAMBDA_FRACTION * lam_hi
    if lam_lo <= floor:
        lam_lo = 0.5 * lam_hi
    for _ in range(MAX_EXPANSIONS):
        if lam_lo < floor:
            break
        if phase_at(p, math.sqrt(lam_lo), ell, rel_tol) < target:
            return math.sqrt(lam_lo), math.sqrt(lam_hi)
        lam_lo *= 0.5
    raise NegativeSpectrumSuspected(
        f"bracket for lambda_{n} of {p.descriptor} collapses toward z = 0; use the oracle")


def solve_one(p: Potential, n: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
              ell: Optional[float] = None, tol: float = DEFAULT_Z_TOL,
              rel_tol: float = DEFAULT_REL_TOL) -> EigenvalueRecord:
    """n-th eigenvalue by bisection with secant acceleration on phi(ell, z) - target.

    A secant step is used only if it lands strictly inside the bracket and the
    bracket keeps shrinking; otherwise, or if the phase is seen to decrease in
    z, the iteration bisects. Iteration continues past ``tol`` until the phase
    residual is within RESIDUAL_TOL; if z runs out of floating-point resolution
    first, IntegrationError is raised.
    """
    ell = _check_ell(p, ell)
    target = bc.target_phase(n)
    a, b = bracket(p, n, bc, ell, rel_tol)

    def f(z):
        return phase_at(p, z, ell, rel_tol) - target

    fa, fb = f(a), f(b)
    best_z, best_f = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    prev_z, prev_f = a, fa
    cur_z, cur_f = b, fb
    secant_ok = True
    width = b - a
    for _ in range(400):
        if best_f == 0.0 or b - a <= 4.0 * EPS * b:
            break
        if b - a <= tol * b and abs(best_f) <= RESIDUAL_TOL:
            break
        cand = None
        if secant_ok and cur_f != prev_f:
            slope = (cur_f - prev_f) / (cur_z - prev_z)
            if slope <= 0.0:
                secant_ok = False
            else:
                s = cur_z - cur_f / slope
                if a < s < b:
                    cand = s
        z = cand if cand is not None else 0.5 * (a + b)
        fz = f(z)
        if fz < 0.0:
            a, fa = z, fz
        else:
            b, fb = z, fz
        if abs(fz) < abs(best_f):
            best_z, best_f = z, fz
        prev_z, prev_f, cur_z, cur_f = cur_z, cur_f, z, fz
        # force a bisection if the bracket did not at least halve over this step
        if cand is not None and b - a > 0.5 * width:
            prev_z, prev_f, cur_z, cur_f = a, fa, b, fb
            z = 0.5 * (a + b)
            fz = f(z)
            if fz < 0.0:
                a, fa = z, fz
            else:
                b, fb = z, fz
            if abs(fz) < abs(best_f):
                best_z, best_f = z, fz
        width = b - a
    if abs(best_f) > RESIDUAL_TOL:
        raise IntegrationError(f"phase residual {abs(best_f):.3g} for lambda_{n} of "
                               f"{p.descriptor} exceeds {RESIDUAL_TOL:g}")
    return EigenvalueRecord(n=n, z_n=best_z, lambda_n=best_z * best_z,
                            residual=abs(best_f), method="shooting")


def solve_range(p: Potential, n_max: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
                ell: Optional[float] = None, tol: float = DEFAULT_Z_TOL,
                rel_tol: float = DEFAULT_REL_TOL,
                oracle_N: int = DEFAULT_ORACLE_N) -> list:
    """Records for n = 1..n_max; nonpositive eigenvalues come from the FD oracle."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    ell = _check_ell(p, ell)
    records = []
    oracle_vals = None
    for n in range(1, n_max + 1):
        try:
            records.append(solve_one(p, n, bc, ell, tol, rel_tol))
        except NegativeSpectrumSuspected:
            if oracle_vals is None:
                try:
                    oracle_vals = refined_eigenvalues(p, ell, n_max, max(oracle_N, 4 * n_max), bc)
                except DomainError as exc:
                    raise OracleError(str(exc)) from exc
            records.append(EigenvalueRecord(n=n, z_n=None, lambda_n=oracle_vals[n - 1],
                                            residual=None, method="oracle"))
    lams = [r.lambda_n for r in records]
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise OracleError(f"computed spectrum of {p.descriptor} is not strictly increasing")
    return records


def eigenvalues(p: Potential, n_max: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
                ell: Optional[float] = None, **kwargs) -> list:
    """Convenience: lambda_1..lambda_{n_max} as floats."""
    return [r.lambda_n for r in solve_range(p, n_max, bc, ell, **kwargs)]
