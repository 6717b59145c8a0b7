"""Modified Pruefer phase/amplitude flow with z-sensitivity.

With y = r sin(phi) and y' = z r cos(phi), the equation -y'' + q y = z^2 y
becomes

    phi'     = z - (q/z) sin^2 phi
    (log r)' = (q/z) sin phi cos phi
    phidot'  = 1 + (q/z^2) sin^2 phi - (q/z) sin(2 phi) phidot

where phidot = d(phi)/dz. The initial data y(0) = 0, y'(0) = 1 give
phi(0) = 0, log r(0) = -log z, phidot(0) = 0. The phase is never reduced
mod 2 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .errors import DomainError, IntegrationError
from .potential import Potential

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
MIN_STEP = 1e-14
MAX_STEPS = 20_000_000

# Dormand-Prince 5(4); 5th-order solution is propagated, the 4th-order one
# only feeds the error estimate.
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                 22 / 525, -1 / 40)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


@njit(cache=True)
def q_at(code, params, xs, qs, x):
    if code == 0:
        return params[0]
    if code == 1:
        return params[0] + params[1] * math.sin(math.pi * x)
    if code == 2:
        return params[0] + params[1] * x
    if code == 3:
        acc = 0.0
        for i in range(params.shape[0] - 1, -1, -1):
            acc = acc * x + params[i]
        return acc
    n = xs.shape[0]
    j = np.searchsorted(xs, x, side="right") - 1
    if j < 0:
        j = 0
    elif j > n - 2:
        j = n - 2
    t = (x - xs[j]) / (xs[j + 1] - xs[j])
    return qs[j] + t * (qs[j + 1] - qs[j])


@njit(cache=True)
def _rhs(code, params, xs, qs, z, x, phi, phidot):
    q = q_at(code, params, xs, qs, x)
    s = math.sin(phi)
    c = math.cos(phi)
    qz = q / z
    s2 = s * s
    return z - qz * s2, qz * s * c, 1.0 + qz / z * s2 - qz * 2.0 * s * c * phidot


@njit(cache=True)
def _integrate(code, params, xs, qs, z, stops, record, rtol, atol, h0):
    """Integrate from x = 0 through every point of ``stops`` (sorted, > 0).

    Steps never cross a stop. Rows of the result for stops with ``record`` set
    hold (phi, log_r, phidot). Returns (rows, status, accepted steps) with
    status 0 ok, 1 step underflow, 2 step budget exhausted.
    """
    m = stops.shape[0]
    out = np.zeros((m, 3))
    x = 0.0
    y0, y1, y2 = 0.0, -math.log(z), 0.0
    k10, k11, k12 = _rhs(code, params, xs, qs, z, x, y0, y2)
    h = h0
    nsteps = 0
    for k in range(m):
        target = stops[k]
        while x < target:
            if h < MIN_STEP:
                return out, 1, nsteps
            if nsteps >= MAX_STEPS:
                return out, 2, nsteps
            last = h >= target - x
            hh = target - x if last else h

            k20, k21, k22 = _rhs(code, params, xs, qs, z, x + _C2 * hh,
                                 y0 + hh * _A21 * k10, y2 + hh * _A21 * k12)
            k30, k31, k32 = _rhs(code, params, xs, qs, z, x + _C3 * hh,
                                 y0 + hh * (_A31 * k10 + _A32 * k20),
                                 y2 + hh * (_A31 * k12 + _A32 * k22))
            k40, k41, k42 = _rhs(code, params, xs, qs, z, x + _C4 * hh,
                                 y0 + hh * (_A41 * k10 + _A42 * k20 + _A43 * k30),
                                 y2 + hh * (_A41 * k12 + _A42 * k22 + _A43 * k32))
            k50, k51, k52 = _rhs(code, params, xs, qs, z, x + _C5 * hh,
                                 y0 + hh * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40),
                                 y2 + hh * (_A51 * k12 + _A52 * k22 + _A53 * k32 + _A54 * k42))
            k60, k61, k62 = _rhs(code, params, xs, qs, z, x + hh,
                                 y0 + hh * (_A61 * k10 + _A62 * k20 + _A63 * k30
                                            + _A64 * k40 + _A65 * k50),
                                 y2 + hh * (_A61 * k12 + _A62 * k22 + _A63 * k32
                                            + _A64 * k42 + _A65 * k52))
            n0 = y0 + hh * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50 + _B6 * k60)
            n1 = y1 + hh * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51 + _B6 * k61)
            n2 = y2 + hh * (_B1 * k12 + _B3 * k32 + _B4 * k42 + _B5 * k52 + _B6 * k62)
            x_new = target if last else x + hh
            k70, k71, k72 = _rhs(code, params, xs, qs, z, x_new, n0, n2)

            e0 = hh * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60 + _E7 * k70)
            e1 = hh * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61 + _E7 * k71)
            e2 = hh * (_E1 * k12 + _E3 * k32 + _E4 * k42 + _E5 * k52 + _E6 * k62 + _E7 * k72)
            err = max(abs(e0) / (atol + rtol * max(abs(y0), abs(n0))),
                      abs(e1) / (atol + rtol * max(abs(y1), abs(n1))),
                      abs(e2) / (atol + rtol * max(abs(y2), abs(n2))))

            if err <= 1.0:
                x = x_new
                y0, y1, y2 = n0, n1, n2
                k10, k11, k12 = k70, k71, k72
                nsteps += 1
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                if last:
                    h = max(h, hh * fac)
                else:
                    h = hh * fac
            else:
                h = hh * max(0.2, 0.9 * err ** -0.2)
        if record[k]:
            out[k, 0] = y0
            out[k, 1] = y1
            out[k, 2] = y2
    return out, 0, nsteps


@dataclass(frozen=True)
class PrueferState:
    """Phase, log-amplitude and z-sensitivity of the shooting solution at ``x``."""

    x: float
    phi: float
    log_r: float
    phi_dot: float


def _abs_bound(p: Potential) -> float:
    if p.is_sampled:
        return max(abs(v) for v in p.values)
    if p.kind == "barrier_sin" or p.kind == "ramp":
        return abs(p.params[0]) + abs(p.params[1])
    return sum(abs(c) for c in p.params)


def integrate_states(p: Potential, z: float, points: Sequence[float],
                     rel_tol: float = DEFAULT_REL_TOL,
                     abs_tol: float = DEFAULT_ABS_TOL) -> list:
    """States at each of ``points`` (sorted, within [0, domain_end]) from one integration."""
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"z must be positive, got {z}")
    if not rel_tol > 0.0:
        raise DomainError("rel_tol must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return []
    if np.any(np.diff(pts) < 0) or pts[0] < 0.0 or pts[-1] > p.domain_end:
        raise DomainError(f"points must be sorted within [0, {p.domain_end}]")

    wanted = np.unique(pts[pts > 0.0])
    states = {0.0: PrueferState(0.0, 0.0, -math.log(z), 0.0)}
    if wanted.size:
        brk = p.breakpoints(0.0, float(wanted[-1]))
        stops = np.union1d(wanted, brk)
        record = np.isin(stops, wanted)
        code, params, xs, qs = p.kernel_args
        h0 = min(float(wanted[-1]), 0.05 / (z + _abs_bound(p) / z))
        rows, status, _ = _integrate(code, params, xs, qs, z, stops, record,
                                     float(rel_tol), float(abs_tol), h0)
        if status != 0:
            reason = "step size underflow" if status == 1 else "step budget exhausted"
            raise IntegrationError(f"{reason} integrating {p.descriptor} at z={z!r}")
        for x, row, keep in zip(stops, rows, record):
            if keep:
                states[float(x)] = PrueferState(float(x), float(row[0]), float(row[1]),
                                                float(row[2]))
    return [states[float(x)] for x in pts]


def integrate_phase(p: Potential, z: float, x_end: float,
                    rel_tol: float = DEFAULT_REL_TOL,
                    abs_tol: float = DEFAULT_ABS_TOL) -> PrueferState:
    """State of the augmented system at ``x_end`` in (0, domain_end]."""
    if not 0.0 < x_end <= p.domain_end:
        raise DomainError(f"x_end must lie in (0, {p.domain_end}], got {x_end}")
    return integrate_states(p, z, [x_end], rel_tol, abs_tol)[0]


def theta(state: PrueferState, z: float) -> float:
    return state.phi / z


def theta_dot(p: Potential, z: float, x0: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """d/dz (phi/z) at x0, i.e. (phi_dot z - phi) / z^2."""
    s = integrate_phase(p, z, x0, rel_tol)
    return (s.phi_dot * z - s.phi) / (z * z)


def eigenfunction_trace(p: Potential, z: float, grid: Sequence[float],
                        rel_tol: float = DEFAULT_REL_TOL) -> list:
    """Unnormalized solution y = r sin(phi) of y(0)=0, y'(0)=1 at the grid points."""
    out = []
    for s in integrate_states(p, z, grid, rel_tol):
        y = 0.0 if s.x == 0.0 else math.exp(s.log_r) * math.sin(s.phi)
        out.append((s.x, y))
    return out
