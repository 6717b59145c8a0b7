"""Finite-difference eigenvalues by Sturm-sequence bisection.

The second-order central difference of -y'' + q y on a uniform grid gives a
symmetric tridiagonal matrix. Dirichlet grids are x_i = i h with
h = ell / (N + 1). Dirichlet-Neumann grids use h = ell / (N + 1/2) so that the
mirror condition y_{N+1} = y_N is a centered difference at x = ell; the last
diagonal entry becomes q(x_N) + 1/h^2.

Eigenvalues are located one at a time by bisection on the count of matrix
eigenvalues below a shift, and are valid for any sign of lambda.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .boundary import BoundaryCondition
from .errors import DomainError, OracleError
from .potential import Potential

REL_TOL = 1e-12
MIN_NODES = 8


@njit(cache=True)
def sturm_count(diag, off, sigma):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``sigma``.

    ``off[i]`` couples rows i and i+1. Counts negative pivots of the LDL^T
    factorization of T - sigma; a vanishing pivot is replaced by -pivmin.
    """
    n = diag.shape[0]
    big = 1.0
    for i in range(n - 1):
        big = max(big, off[i] * off[i])
    pivmin = 2.2250738585072014e-308 * big
    count = 0
    d = diag[0] - sigma
    if abs(d) <= pivmin:
        d = -pivmin
    if d < 0.0:
        count += 1
    for i in range(1, n):
        d = (diag[i] - sigma) - off[i - 1] * off[i - 1] / d
        if abs(d) <= pivmin:
            d = -pivmin
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def _fd_count(qv, h, sigma, neumann):
    """Sturm count for the FD operator in the scaled pivot form.

    With pivots d_i = (1 + g_i)/h^2 the recurrence reads
    g_i = g_{i-1} / (1 + g_{i-1}) + h^2 (q_i - sigma). Carrying g rather than
    the pivot itself avoids the eps/h^2 absolute error of forming 2/h^2 + q_i.
    """
    n = qv.shape[0]
    h2 = h * h
    tiny = 1e-300
    count = 0
    g = 1.0 + h2 * (qv[0] - sigma)
    if g == -1.0:
        g = -1.0 - tiny
    if g < -1.0:
        count += 1
    for i in range(1, n):
        t = g / (1.0 + g)
        if neumann and i == n - 1:
            # last pivot is t + h^2 (q_N - sigma) rather than 1 + t + ...
            if t + h2 * (qv[i] - sigma) < 0.0:
                count += 1
            break
        g = t + h2 * (qv[i] - sigma)
        if g == -1.0:
            g = -1.0 - tiny
        if g < -1.0:
            count += 1
    return count


@njit(cache=True)
def _bisect_all(qv, h, neumann, lows, highs, rtol, atol):
    """k-th eigenvalue (k = 1..len(lows)) inside its bracket [lows[k-1], highs[k-1]]."""
    m = lows.shape[0]
    out = np.empty(m)
    for j in range(m):
        k = j + 1
        lo = lows[j]
        hi = highs[j]
        if j > 0 and out[j - 1] > lo:
            lo = out[j - 1] - atol
        for _ in range(400):
            if hi - lo <= max(rtol * max(abs(lo), abs(hi)), atol):
                break
            mid = 0.5 * (lo + hi)
            if _fd_count(qv, h, mid, neumann) >= k:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out


@dataclass(frozen=True)
class FdProblem:
    """Discretized operator: N interior nodes, spacing h, symmetric tridiagonal entries."""

    N: int
    h: float
    nodes: np.ndarray
    q: np.ndarray
    bc: BoundaryCondition

    @property
    def diag(self) -> np.ndarray:
        d = self.q + 2.0 / self.h ** 2
        if self.bc is BoundaryCondition.DIRICHLET_NEUMANN:
            d[-1] = self.q[-1] + 1.0 / self.h ** 2
        return d

    @property
    def offdiag(self) -> np.ndarray:
        return np.full(self.N - 1, -1.0 / self.h ** 2)

    def count_below(self, sigma: float) -> int:
        return int(_fd_count(self.q, self.h, float(sigma),
                             self.bc is BoundaryCondition.DIRICHLET_NEUMANN))

    def free_eigenvalue(self, k: int) -> float:
        """k-th eigenvalue of the same matrix with q = 0 (closed form)."""
        ell = self.h * (self.N + 1 if self.bc is BoundaryCondition.DIRICHLET else self.N + 0.5)
        angle = self.bc.target_phase(k) * self.h / ell
        return 4.0 / self.h ** 2 * math.sin(0.5 * angle) ** 2


def fd_problem(p: Potential, ell: float, N: int,
               bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> FdProblem:
    if N < MIN_NODES:
        raise DomainError(f"N must be >= {MIN_NODES}, got {N}")
    if not 0.0 < ell <= p.domain_end:
        raise DomainError(f"ell must lie in (0, {p.domain_end}], got {ell}")
    h = ell / (N + 1) if bc is BoundaryCondition.DIRICHLET else ell / (N + 0.5)
    nodes = h * np.arange(1, N + 1)
    nodes[-1] = min(nodes[-1], ell)
    return FdProblem(N=N, h=h, nodes=nodes, q=np.asarray(p(nodes), dtype=np.float64), bc=bc)


def fd_eigenvalues(p: Potential, ell: float, n_max: int, N: int,
                   bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> list:
    """Lowest ``n_max`` eigenvalues of the FD matrix, each to relative tolerance 1e-12."""
    if n_max < 1 or n_max > N // 4:
        raise DomainError(f"need 1 <= n_max <= N/4, got n_max={n_max}, N={N}")
    prob = fd_problem(p, ell, N, bc)
    q_lo, q_hi = float(prob.q.min()), float(prob.q.max())
    # eigenvalue k lies within [free_k + min q, free_k + max q]
    free = np.array([prob.free_eigenvalue(k) for k in range(1, n_max + 1)])
    pad = 1e-9 * (np.abs(free) + abs(q_lo) + abs(q_hi) + 1.0)
    lows, highs = free + q_lo - pad, free + q_hi + pad
    atol = 1e-13 * (1.0 + abs(q_lo) + abs(q_hi))
    neumann = bc is BoundaryCondition.DIRICHLET_NEUMANN
    vals = _bisect_all(prob.q, prob.h, neumann, lows, highs, REL_TOL, atol)
    for k, (v, lo, hi) in enumerate(zip(vals, lows, highs), start=1):
        if not lo <= v <= hi or prob.count_below(hi) < k:
            raise OracleError(f"bisection failed to isolate eigenvalue {k}")
    return [float(v) for v in vals]


def _spacing(N: int, ell: float, bc: BoundaryCondition) -> float:
    return ell / (N + 1) if bc is BoundaryCondition.DIRICHLET else ell / (N + 0.5)


def refined_eigenvalues(p: Potential, ell: float, n_max: int, N: int,
                        bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> list:
    """Richardson extrapolation of grids N and 2N, assuming an O(h^2) leading error.

    Uses lam* = (r^2 lam_2N - lam_N) / (r^2 - 1) with r the exact spacing
    ratio, which is (4 lam_2N - lam_N)/3 when r = 2.
    """
    coarse = fd_eigenvalues(p, ell, n_max, N, bc)
    fine = fd_eigenvalues(p, ell, n_max, 2 * N, bc)
    r2 = (_spacing(N, ell, bc) / _spacing(2 * N, ell, bc)) ** 2
    return [(r2 * f - c) / (r2 - 1.0) for c, f in zip(coarse, fine)]


def refined_eigenvalue(p: Potential, ell: float, n: int, N: int,
                       bc: BoundaryCondition = BoundaryCondition.DIRICHLET) -> float:
    return refined_eigenvalues(p, ell, n, N, bc)[n - 1]
