"""Reference computations that share no code path with the package solvers."""
import math
from fractions import Fraction

import numpy as np
from numba import njit


@njit(cache=True)
def _rk4_linear(a, b, z, x_end, h, record_every):
    # y'' = (q - z^2) y with q = a + b sin(pi x), y(0) = 0, y'(0) = 1
    n = int(round(x_end / h))
    h = x_end / n
    m = n // record_every + 1
    xs = np.empty(m)
    ys = np.empty(m)
    dys = np.empty(m)
    y, dy, x = 0.0, 1.0, 0.0
    xs[0], ys[0], dys[0] = 0.0, 0.0, 1.0
    j = 1
    z2 = z * z
    for i in range(1, n + 1):
        f1 = a + b * math.sin(math.pi * x) - z2
        xm = x + 0.5 * h
        fm = a + b * math.sin(math.pi * xm) - z2
        xe = x + h
        fe = a + b * math.sin(math.pi * xe) - z2
        k1y, k1d = dy, f1 * y
        k2y, k2d = dy + 0.5 * h * k1d, fm * (y + 0.5 * h * k1y)
        k3y, k3d = dy + 0.5 * h * k2d, fm * (y + 0.5 * h * k2y)
        k4y, k4d = dy + h * k3d, fe * (y + h * k3y)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        x = i * h
        if i % record_every == 0:
            xs[j], ys[j], dys[j] = x, y, dy
            j += 1
    return xs[:j], ys[:j], dys[:j]


def rk4_barrier_sin(a, b, z, x_end, h=1e-6, record_every=100):
    """Fixed-step RK4 on the linear ODE; returns (x, y, phase, log_r) along the path.

    The phase is atan2(z y, y') unwrapped along the dense trajectory.
    """
    xs, ys, dys = _rk4_linear(float(a), float(b), float(z), float(x_end), float(h),
                              int(record_every))
    phase = np.unwrap(np.arctan2(z * ys, dys))
    log_r = 0.5 * np.log(ys ** 2 + (dys / z) ** 2)
    return xs, ys, phase, log_r


def fd_theta_dot(phase_fn, z, h=1e-5):
    """Central difference of phi(z)/z."""
    return (phase_fn(z + h) / (z + h) - phase_fn(z - h) / (z - h)) / (2 * h)


def brute_count(diag, off, sigma):
    """Eigenvalues below sigma from a dense symmetric eigensolve."""
    n = len(diag)
    T = np.diag(np.asarray(diag, float))
    if n > 1:
        T += np.diag(np.asarray(off, float), 1) + np.diag(np.asarray(off, float), -1)
    return int(np.sum(np.linalg.eigvalsh(T) < sigma))


def minors_count(diag, off, sigma):
    """Sign changes of the leading principal minors of sigma I - T, in exact arithmetic.

    Valid when no minor vanishes; returns None otherwise.
    """
    s = Fraction(sigma)
    p_prev, p = Fraction(1), s - Fraction(diag[0])
    seq = [p_prev, p]
    for i in range(1, len(diag)):
        p_prev, p = p, (s - Fraction(diag[i])) * p - Fraction(off[i - 1]) ** 2 * p_prev
        seq.append(p)
    if any(v == 0 for v in seq):
        return None
    # the number of agreements in sign equals the number of eigenvalues below sigma
    return sum(1 for u, v in zip(seq, seq[1:]) if (u > 0) == (v > 0))
