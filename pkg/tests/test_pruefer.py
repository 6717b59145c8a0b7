import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import fd_theta_dot, rk4_barrier_sin
from sturmratio import (DomainError, IntegrationError, Potential, PrueferState, classify,
                        eigenfunction_trace, integrate_phase, min_max, solve_one, theta,
                        theta_dot)
from sturmratio.pruefer import integrate_states

# RK4 on y'' = (q - z^2) y, step 1e-6, phase from atan2(z y, y')
PHI_BARRIER_Z4 = 4.2267476318995145
LOG_R_BARRIER_Z4 = -1.518118588455088
# central differences of phi/z in z, h = 1e-5
THETA_DOT_CONST2_Z2 = -0.289646934603649
THETA_DOT_RAMP_Z3 = -0.03629230884705237
# RK4 trace of the first barrier_sin(-5, 4) eigenfunction at x = 0.1..0.5
TRACE_Z1 = [0.0979074675669543, 0.1843350825315059, 0.2509326636070289,
            0.2925902991195677, 0.3067303031190572]


def phase(p, z, x=1.0):
    return integrate_phase(p, z, x).phi


def test_free_phase_at_pi(zero):
    s = integrate_phase(zero, math.pi, 1.0)
    assert s.phi == pytest.approx(math.pi, rel=1e-14)
    assert s.phi_dot == pytest.approx(1.0, rel=1e-14)
    assert s.log_r == pytest.approx(-math.log(math.pi), rel=1e-14)


def test_free_phase_partial(zero):
    assert phase(zero, 2.5, 0.4) == pytest.approx(1.0, rel=1e-14)


def test_constant_shift_phase():
    z = math.sqrt(math.pi ** 2 - 3)
    assert phase(Potential.constant(-3), z) == pytest.approx(math.pi, rel=1e-10)


def test_barrier_phase_frozen(barrier):
    s = integrate_phase(barrier, 4.0, 1.0)
    assert s.phi == pytest.approx(PHI_BARRIER_Z4, abs=1e-9)
    assert s.log_r == pytest.approx(LOG_R_BARRIER_Z4, abs=1e-9)


def test_barrier_phase_against_live_rk4(barrier):
    xs, _, ph, lr = rk4_barrier_sin(-5, 4, 7.5, 1.0, record_every=100_000)
    states = integrate_states(barrier, 7.5, xs)
    np.testing.assert_allclose([s.phi for s in states], ph, atol=1e-9)
    np.testing.assert_allclose([s.log_r for s in states], lr, atol=1e-9)


def test_initial_state():
    s = integrate_states(Potential.constant(-4), 2.0, [0.0])[0]
    assert s == PrueferState(0.0, 0.0, -math.log(2.0), 0.0)


def test_theta_examples(zero):
    s = integrate_phase(zero, 3.0, 0.7)
    assert theta(s, 3.0) == pytest.approx(0.7, rel=1e-14)
    assert theta(PrueferState(1.0, math.pi, 0.0, 1.0), math.pi) == 1.0
    assert theta(PrueferState(1.0, 3.0, 0.0, 1.0), 2.0) == 1.5


def test_theta_dot_free_is_zero(zero):
    for z in (0.5, 3.0, 40.0):
        assert abs(theta_dot(zero, z, 0.7)) < 1e-14


def test_theta_dot_constant_frozen():
    p = Potential.constant(-2)
    td = theta_dot(p, 2.0, 1.0)
    assert td < 0
    assert td == pytest.approx(THETA_DOT_CONST2_Z2, abs=1e-8)


def test_theta_dot_ramp_frozen():
    p = Potential.ramp(-2, 2)
    td = theta_dot(p, 3.0, 1.0)
    assert td <= 0
    assert td == pytest.approx(THETA_DOT_RAMP_Z3, abs=1e-8)


def test_theta_dot_live_fd_oracle():
    p = Potential.ramp(-5, 5)
    for z in (3.2, 6.0, 11.0):
        ref = fd_theta_dot(lambda w: phase(p, w, 0.8), z)
        assert theta_dot(p, z, 0.8) == pytest.approx(ref, abs=1e-7)


def test_eigenfunction_trace_free(zero):
    tr = eigenfunction_trace(zero, math.pi, [0.0, 0.5, 1.0])
    assert tr[0] == (0.0, 0.0)
    assert tr[1][1] == pytest.approx(1 / math.pi, rel=1e-12)
    assert abs(tr[2][1]) < 1e-13
    [(x, y)] = eigenfunction_trace(zero, 2 * math.pi, [0.25])
    assert y == pytest.approx(1 / (2 * math.pi), rel=1e-12)


def test_eigenfunction_trace_first_mode(barrier):
    z1 = solve_one(barrier, 1).z_n
    grid = np.linspace(0, 1, 11)
    ys = [y for _, y in eigenfunction_trace(barrier, z1, grid)]
    assert all(y > 0 for y in ys[1:-1])
    np.testing.assert_allclose(ys[1:6], TRACE_Z1, atol=1e-9)
    np.testing.assert_allclose(ys[6:10], TRACE_Z1[:4][::-1], atol=1e-9)


def test_domain_errors(zero):
    for z in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            integrate_phase(zero, z, 1.0)
    with pytest.raises(DomainError):
        integrate_phase(zero, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_phase(zero.with_domain_end(0.5), 1.0, 0.75)
    with pytest.raises(DomainError):
        eigenfunction_trace(zero, 1.0, [0.5, 0.2])


def test_step_underflow_is_reported(barrier):
    with pytest.raises(IntegrationError, match="underflow"):
        integrate_phase(barrier, 4.0, 1.0, rel_tol=1e-30, abs_tol=1e-300)


def test_sampled_nodes_reproduce_linear_potential():
    ramp = Potential.ramp(-3, 2)
    xs = [0.0, 0.137, 0.5, 0.81, 1.0]
    sampled = Potential.sampled(xs, [-3 + 2 * x for x in xs])
    for z in (1.0, 5.0, 17.0):
        a, b = integrate_phase(ramp, z, 1.0), integrate_phase(sampled, z, 1.0)
        assert a.phi == pytest.approx(b.phi, abs=1e-9)
        assert a.phi_dot == pytest.approx(b.phi_dot, abs=1e-9)


# properties ----------------------------------------------------------------

nonpositive_family = st.one_of(
    st.builds(Potential.constant, st.floats(-20, 0)),
    st.builds(lambda a, b: Potential.barrier_sin(a - abs(b), b), st.floats(-20, 0),
              st.floats(-10, 10)),
    st.builds(lambda a, b: Potential.ramp(a - max(b, 0), b), st.floats(-20, 0),
              st.floats(-10, 10)),
)


@settings(max_examples=40, deadline=None)
@given(z=st.floats(0.1, 60), x=st.floats(0.01, 1.0))
def test_free_phase_exact_property(z, x):
    assert abs(phase(Potential.constant(0), z, x) - z * x) <= 10 * 1e-10 * z * x


@settings(max_examples=40, deadline=None)
@given(p=nonpositive_family, z=st.floats(0.3, 40), x=st.floats(0.01, 1.0))
def test_phase_bounds_property(p, z, x):
    q_min = min(p(np.linspace(0, 1, 2001)))
    phi = phase(p, z, x)
    slack = 1e-9 * (1 + abs(phi))
    assert z * x - slack <= phi <= (z - q_min / z) * x + slack


@settings(max_examples=25, deadline=None)
@given(p=nonpositive_family, z=st.floats(0.5, 30), x=st.floats(0.05, 1.0))
def test_sensitivity_matches_finite_difference(p, z, x):
    h = 1e-5
    fd = (phase(p, z + h, x) - phase(p, z - h, x)) / (2 * h)
    assert integrate_phase(p, z, x).phi_dot == pytest.approx(fd, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(p=nonpositive_family, t=st.floats(0, 30), dz=st.floats(1e-3, 5), x=st.floats(0.05, 1))
def test_phase_increasing_in_z(p, t, dz, x):
    # phi_dot > 0 is guaranteed once z^2 >= -q_min (the forcing 1 + q sin^2/z^2 is >= 0)
    z = math.sqrt(max(-min_max(p)[0], 0.0)) + 0.1 + t
    assert phase(p, z + dz, x) > phase(p, z, x)


def test_phase_not_monotone_for_small_z():
    p = Potential.constant(-5)
    assert phase(p, 1.5) < phase(p, 0.5)


@settings(max_examples=20, deadline=None)
@given(p=nonpositive_family, t=st.floats(0, 1), x0=st.floats(0.1, 1.0))
def test_theorem1_property(p, t, x0):
    if not classify(p.with_domain_end(x0)).monotone_increasing:
        return
    q_min = min_max(p)[0]
    z_star = math.sqrt(-2 * q_min) if q_min < -1e-9 else math.pi
    z = z_star * (1 + 3 * t)
    assert theta_dot(p, z, x0) <= 1e-8
