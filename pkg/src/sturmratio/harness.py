"""Machine-checkable eigenvalue-ratio inequalities over computed spectra.

Every check is stored as ``lhs >= rhs`` with ``margin = lhs - rhs``. Lower
bounds on a ratio put the ratio on the left; upper bounds (and the sign
condition on d(theta)/dz) put the bound on the left. A report passes iff
every margin is >= -slack * max(1, |rhs|).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boundary import BoundaryCondition
from .eigensolver import DEFAULT_Z_TOL, solve_one, solve_range
from .errors import DomainError, IneligiblePotential, NegativeSpectrumSuspected
from .oracle import refined_eigenvalues
from .potential import Potential, classify, min_max
from .pruefer import DEFAULT_REL_TOL, theta_dot

SCHEMA_VERSION = 1
DEFAULT_SLACK = 1e-8
DEFAULT_ORACLE_N = 20_000
L0_TOL = 1e-10

THEOREMS = ("T1", "T2", "T3", "T4", "AB_n2", "AB_ceil", "Chen_floor", "HK_singlewell")
CITED = ("AB_n2", "AB_ceil", "Chen_floor", "HK_singlewell")
UPPER_BOUNDS = frozenset({"T1", "AB_n2", "AB_ceil", "HK_singlewell"})


@dataclass
class VerificationReport:
    theorem: str
    potential: str
    ell: float
    checks: list
    eligible_count: int
    passed: bool
    tolerances: dict
    ineligible: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def recompute_pass(self) -> bool:
        slack = self.tolerances["slack"]
        return all(c["margin"] >= -slack * max(1.0, abs(c["rhs"])) for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "theorem": self.theorem,
            "potential": self.potential,
            "ell": self.ell,
            "checks": self.checks,
            "eligible_count": self.eligible_count,
            "pass": self.passed,
            "tolerances": self.tolerances,
            "ineligible": self.ineligible,
            "details": self.details,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        """One row per check: key columns, lhs, rhs, margin, ok (1/0)."""
        keys = ["z"] if self.theorem == "T1" else ["m", "n"]
        slack = self.tolerances["slack"]
        lines = [",".join(keys + ["lhs", "rhs", "margin", "ok"])]
        for c in self.checks:
            ok = c["margin"] >= -slack * max(1.0, abs(c["rhs"]))
            row = [repr(c[k]) for k in keys]
            row += [repr(c["lhs"]), repr(c["rhs"]), repr(c["margin"]), "1" if ok else "0"]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _finish(theorem, p, ell, checks, ineligible, tolerances, details=None):
    details = dict(details or {})
    notes = classify(p).notes
    if notes:
        details["notes"] = list(notes)
    report = VerificationReport(theorem=theorem, potential=p.descriptor, ell=ell,
                                checks=checks, eligible_count=len(checks), passed=False,
                                tolerances=tolerances, ineligible=ineligible,
                                details=details)
    report.passed = report.recompute_pass()
    return report


def _check(lhs: float, rhs: float, **key) -> dict:
    return {**key, "lhs": float(lhs), "rhs": float(rhs), "margin": float(lhs - rhs)}


def spectrum(p: Potential, n_max: int, bc: BoundaryCondition = BoundaryCondition.DIRICHLET,
             ell: Optional[float] = None, source: str = "shooting",
             rel_tol: float = DEFAULT_REL_TOL, oracle_N: int = DEFAULT_ORACLE_N) -> list:
    """lambda_1..lambda_{n_max} from the shooting solver or the Richardson FD oracle."""
    ell = p.domain_end if ell is None else ell
    if source == "shooting":
        return [r.lambda_n for r in solve_range(p, n_max, bc, ell, rel_tol=rel_tol,
                                                oracle_N=oracle_N)]
    if source == "oracle":
        return refined_eigenvalues(p, ell, n_max, max(oracle_N, 4 * n_max), bc)
    raise DomainError(f"unknown spectrum source {source!r}")


def _tolerances(slack, source, rel_tol, oracle_N, **extra):
    tol = {"slack": slack, "slack_scale": "max(1,|rhs|)", "source": source}
    if source == "shooting":
        tol.update(rel_tol=rel_tol, z_tol=DEFAULT_Z_TOL)
    else:
        tol.update(oracle_N=oracle_N)
    tol.update(extra)
    return tol


def _ratio_checks(lams, bound, eligible):
    checks, skipped = [], []
    for n in range(2, len(lams) + 1):
        for m in range(1, n):
            lam_m, lam_n = lams[m - 1], lams[n - 1]
            if not eligible(m, n, lam_m, lam_n):
                skipped.append({"m": m, "n": n, "lambda_m": lam_m, "lambda_n": lam_n})
                continue
            checks.append(bound(m, n, lam_m, lam_n))
    return checks, skipped


def _require(cond: bool, p: Potential, what: str):
    if not cond:
        raise IneligiblePotential(f"{p.descriptor} is not {what}")


# Theorem 1 ------------------------------------------------------------------


def check_theorem1(p: Potential, x0: Optional[float] = None, z_count: int = 64,
                   rel_tol: float = DEFAULT_REL_TOL,
                   slack: float = DEFAULT_SLACK) -> VerificationReport:
    """Sign of d(theta)/dz at x0 on a geometric z-grid over [z*, 4 z*], z* = sqrt(-2 q_min).

    ``x0`` defaults to the right end for monotone potentials and to the
    barrier peak otherwise. q must be nonpositive and nondecreasing on [0, x0].
    """
    ell = p.domain_end
    if x0 is None:
        shape = classify(p)
        x0 = ell if shape.monotone_increasing else shape.single_barrier
        if not x0:
            raise IneligiblePotential(f"{p.descriptor} has no increasing stretch [0, x0]")
    if not 0.0 < x0 <= ell:
        raise DomainError(f"x0 must lie in (0, {ell}], got {x0}")
    head = classify(p.with_domain_end(x0))
    _require(classify(p).nonpositive, p, "nonpositive")
    _require(head.monotone_increasing, p, f"nondecreasing on [0, {x0}]")

    q_min = min_max(p)[0]
    z_star = math.sqrt(max(-2.0 * q_min, 0.0))
    z_lo = z_star if z_star > 1e-6 else math.pi
    zs = np.geomspace(z_lo, 4.0 * z_lo, z_count)
    checks = [_check(0.0, theta_dot(p, float(z), x0, rel_tol), z=float(z)) for z in zs]
    tol = _tolerances(slack, "shooting", rel_tol, None)
    details = {"x0": float(x0), "q_min": q_min, "z_min": float(zs[0]), "z_max": float(zs[-1])}
    return _finish("T1", p, ell, checks, [], tol, details)


# Theorems 2 and 4 -------------------------------------------------------------


def check_theorem2(p: Potential, n_max: int = 15, source: str = "shooting",
                   rel_tol: float = DEFAULT_REL_TOL, oracle_N: int = DEFAULT_ORACLE_N,
                   slack: float = DEFAULT_SLACK) -> VerificationReport:
    """lambda_n/lambda_m >= n^2/m^2 over pairs with lambda_m >= -2 q_min (Dirichlet)."""
    shape = classify(p)
    _require(shape.nonpositive, p, "nonpositive")
    _require(shape.single_barrier is not None, p, "single-barrier")
    ell = p.domain_end
    q_min = min_max(p)[0]
    threshold = -2.0 * q_min
    lams = spectrum(p, n_max, BoundaryCondition.DIRICHLET, ell, source, rel_tol, oracle_N)
    checks, skipped = _ratio_checks(
        lams,
        lambda m, n, lm, ln: _check(ln / lm, n * n / (m * m), m=m, n=n),
        lambda m, n, lm, ln: lm >= threshold and ln > lm,
    )
    tol = _tolerances(slack, source, rel_tol, oracle_N)
    details = {"q_min": q_min, "threshold": threshold, "x0": shape.single_barrier,
               "eigenvalues": lams}
    return _finish("T2", p, ell, checks, skipped, tol, details)


def check_theorem4(p: Potential, n_max: int = 10, source: str = "shooting",
                   rel_tol: float = DEFAULT_REL_TOL, oracle_N: int = DEFAULT_ORACLE_N,
                   slack: float = DEFAULT_SLACK) -> VerificationReport:
    """Dirichlet-Neumann: lambda_n/lambda_m >= (2n-1)^2/(2m-1)^2 when lambda_m >= -2 q_min."""
    shape = classify(p)
    _require(shape.nonpositive, p, "nonpositive")
    _require(shape.monotone_increasing, p, "nondecreasing")
    ell = p.domain_end
    q_min = min_max(p)[0]
    threshold = -2.0 * q_min
    lams = spectrum(p, n_max, BoundaryCondition.DIRICHLET_NEUMANN, ell, source, rel_tol,
                    oracle_N)
    checks, skipped = _ratio_checks(
        lams,
        lambda m, n, lm, ln: _check(ln / lm, (2 * n - 1) ** 2 / (2 * m - 1) ** 2, m=m, n=n),
        lambda m, n, lm, ln: lm >= threshold and ln > lm,
    )
    tol = _tolerances(slack, source, rel_tol, oracle_N)
    details = {"q_min": q_min, "threshold": threshold, "eigenvalues": lams}
    return _finish("T4", p, ell, checks, skipped, tol, details)


# Theorem 3 ------------------------------------------------------------------


def _lambda1(p, ell, source, rel_tol, oracle_N):
    if source == "oracle":
        return refined_eigenvalues(p, ell, 1, oracle_N)[0]
    try:
        return solve_one(p, 1, BoundaryCondition.DIRICHLET, ell, rel_tol=rel_tol).lambda_n
    except NegativeSpectrumSuspected:
        return refined_eigenvalues(p, ell, 1, oracle_N)[0]


def find_l0(p: Potential, grid: int = 32, source: str = "shooting",
            rel_tol: float = DEFAULT_REL_TOL, oracle_N: int = DEFAULT_ORACLE_N,
            tol: float = L0_TOL):
    """Largest ell in (0, domain_end] with lambda_1(ell) >= -2 min_{[0, ell]} q.

    The gap lambda_1(ell) + 2 min_{[0, ell]} q decreases strictly in ell, so
    after a scan of ``grid`` equally spaced points the crossing is bisected
    down to width ``tol``. Returns (ell0, lambda_1(ell0)).
    """
    shape = classify(p)
    _require(shape.nonpositive, p, "nonpositive")
    _require(shape.single_barrier is not None, p, "single-barrier")
    if grid < 1:
        raise DomainError("grid must be >= 1")

    def gap(ell):
        lam = _lambda1(p, ell, source, rel_tol, oracle_N)
        return lam + 2.0 * min_max(p, 0.0, ell)[0], lam

    end = p.domain_end
    g_end, lam_end = gap(end)
    if g_end >= 0.0:
        return end, lam_end

    hi = end
    lo = None
    for k in range(grid - 1, 0, -1):
        ell = end * k / grid
        g, lam = gap(ell)
        if g >= 0.0:
            lo, lam_lo = ell, lam
            break
        hi = ell
    while lo is None:
        ell = 0.5 * hi
        g, lam = gap(ell)
        if g >= 0.0:
            lo, lam_lo = ell, lam
        else:
            hi = ell
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g, lam = gap(mid)
        if g >= 0.0:
            lo, lam_lo = mid, lam
        else:
            hi = mid
    return lo, lam_lo


def check_theorem3(p: Potential, n_max: int = 10, grid: int = 32, source: str = "shooting",
                   rel_tol: float = DEFAULT_REL_TOL, oracle_N: int = DEFAULT_ORACLE_N,
                   slack: float = DEFAULT_SLACK) -> VerificationReport:
    """Ratio bound n^2/m^2 for every pair n > m on [0, ell0] from find_l0."""
    ell0, lam1 = find_l0(p, grid, source, rel_tol, oracle_N)
    lams = spectrum(p, n_max, BoundaryCondition.DIRICHLET, ell0, source, rel_tol, oracle_N)
    checks, skipped = _ratio_checks(
        lams,
        lambda m, n, lm, ln: _check(ln / lm, n * n / (m * m), m=m, n=n),
        lambda m, n, lm, ln: True,
    )
    tol = _tolerances(slack, source, rel_tol, oracle_N, l0_tol=L0_TOL)
    q_min = min_max(p, 0.0, ell0)[0]
    details = {"ell0": ell0, "lambda1": lam1, "q_min": q_min, "threshold": -2.0 * q_min,
               "eigenvalues": lams}
    return _finish("T3", p, ell0, checks, skipped, tol, details)


# bounds cited from earlier work ----------------------------------------------


def check_cited_bounds(p: Potential, n_max: int = 12, which: str = "Chen_floor",
                       source: str = "shooting", rel_tol: float = DEFAULT_REL_TOL,
                       oracle_N: int = DEFAULT_ORACLE_N,
                       slack: float = DEFAULT_SLACK) -> VerificationReport:
    """One of the classical Dirichlet ratio bounds.

    AB_n2          lambda_n/lambda_1 <= n^2            (q >= 0)
    AB_ceil        lambda_n/lambda_m <= ceil(n/m)^2    (q >= 0)
    Chen_floor     lambda_n/lambda_m >= floor(n/m)^2   (q <= 0, pairs with lambda_m > 0)
    HK_singlewell  lambda_n/lambda_m <= n^2/m^2        (q >= 0, single-well)
    """
    if which not in CITED:
        raise DomainError(f"unknown bound {which!r}; choose from {', '.join(CITED)}")
    shape = classify(p)
    q_min = min_max(p)[0]
    nonnegative = q_min >= -shape.tol
    if which == "Chen_floor":
        _require(shape.nonpositive, p, "nonpositive")
    else:
        _require(nonnegative, p, "nonnegative")
    if which == "HK_singlewell":
        _require(shape.single_well is not None, p, "single-well")

    ell = p.domain_end
    lams = spectrum(p, n_max, BoundaryCondition.DIRICHLET, ell, source, rel_tol, oracle_N)
    if which == "AB_n2":
        bound = lambda m, n, lm, ln: _check(n * n, ln / lm, m=m, n=n)  # noqa: E731
        eligible = lambda m, n, lm, ln: m == 1  # noqa: E731
    elif which == "AB_ceil":
        bound = lambda m, n, lm, ln: _check(math.ceil(n / m) ** 2, ln / lm, m=m, n=n)  # noqa: E731
        eligible = lambda m, n, lm, ln: True  # noqa: E731
    elif which == "Chen_floor":
        bound = lambda m, n, lm, ln: _check(ln / lm, (n // m) ** 2, m=m, n=n)  # noqa: E731
        eligible = lambda m, n, lm, ln: lm > 0.0  # noqa: E731
    else:
        bound = lambda m, n, lm, ln: _check(n * n / (m * m), ln / lm, m=m, n=n)  # noqa: E731
        eligible = lambda m, n, lm, ln: True  # noqa: E731
    checks, skipped = _ratio_checks(lams, bound, eligible)
    tol = _tolerances(slack, source, rel_tol, oracle_N)
    return _finish(which, p, ell, checks, skipped, tol, {"q_min": q_min, "eigenvalues": lams})


def verify(theorem: str, p: Potential, n_max: Optional[int] = None, **kwargs) -> VerificationReport:
    """Dispatch on a theorem id (case-insensitive)."""
    key = {t.lower(): t for t in THEOREMS}.get(theorem.lower())
    if key is None:
        raise DomainError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    if key == "T1":
        return check_theorem1(p, **kwargs)
    sized = {} if n_max is None else {"n_max": n_max}
    if key == "T2":
        return check_theorem2(p, **sized, **kwargs)
    if key == "T3":
        return check_theorem3(p, **sized, **kwargs)
    if key == "T4":
        return check_theorem4(p, **sized, **kwargs)
    return check_cited_bounds(p, which=key, **sized, **kwargs)
