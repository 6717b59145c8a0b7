import math

import numpy as np
import pytest

from conftest import random_barrier
from sturmratio import (BoundaryCondition, IntegrationError, NegativeSpectrumSuspected,
                        Potential, bracket, eigenvalues, min_max, phase_at,
                        refined_eigenvalues, solve_one, solve_range)

D = BoundaryCondition.DIRICHLET
DN = BoundaryCondition.DIRICHLET_NEUMANN
PI2 = math.pi ** 2
# Richardson-refined FD at N = 1e5 / 2e5; identical to 1e-12 at N = 12500..50000
LAMBDA1_BARRIER = 8.258963463716224


def test_phase_at_examples(zero):
    assert phase_at(zero, 3 * math.pi, 1.0) == pytest.approx(3 * math.pi, rel=1e-14)
    assert phase_at(zero, math.pi, 0.5) == pytest.approx(math.pi / 2, rel=1e-14)
    z = math.sqrt(4 * PI2 - 3)
    assert phase_at(Potential.constant(-3), z) == pytest.approx(2 * math.pi, rel=1e-10)


def test_bracket_free(zero):
    lo, hi = bracket(zero, 1, D)
    assert lo < math.pi < hi


def test_bracket_constant_shift():
    lo, hi = bracket(Potential.constant(-3), 2, D)
    assert lo < math.sqrt(4 * PI2 - 3) < hi


def test_bracket_barrier_within_comparison_window(barrier):
    lo, hi = bracket(barrier, 1, D)
    assert math.sqrt(PI2 - 5) * (1 - 1e-5) <= lo < hi <= math.pi * (1 + 1e-5)
    assert phase_at(barrier, lo) < math.pi < phase_at(barrier, hi)


def test_bracket_rejects_nonpositive_eigenvalue():
    with pytest.raises(NegativeSpectrumSuspected):
        bracket(Potential.constant(-20), 1, D)
    with pytest.raises(NegativeSpectrumSuspected):
        solve_one(Potential.constant(-10), 1, D)


@pytest.mark.parametrize("p, n, bc, expected", [
    (Potential.constant(0), 3, D, 88.82643960980423),
    (Potential.constant(-3), 2, D, 36.47841760435743),
    (Potential.constant(0), 2, DN, 22.206609902451056),
])
def test_solve_one_examples(p, n, bc, expected):
    rec = solve_one(p, n, bc)
    assert rec.lambda_n == pytest.approx(expected, rel=1e-10)
    assert rec.method == "shooting" and rec.residual <= 1e-9
    assert rec.lambda_n == rec.z_n ** 2


def test_solve_one_barrier_frozen(barrier):
    assert solve_one(barrier, 1).lambda_n == pytest.approx(LAMBDA1_BARRIER, rel=1e-9)


def test_solve_range_examples(zero):
    lams = eigenvalues(zero, 5)
    np.testing.assert_allclose(lams, [k * k * PI2 for k in range(1, 6)], rtol=1e-12)
    lams = eigenvalues(Potential.constant(-3), 3)
    np.testing.assert_allclose(lams, [k * k * PI2 - 3 for k in range(1, 4)], rtol=1e-10)


def test_solve_range_barrier_vs_oracle(barrier):
    recs = solve_range(barrier, 10)
    lams = [r.lambda_n for r in recs]
    assert all(b > a for a, b in zip(lams, lams[1:]))
    ref = refined_eigenvalues(barrier, 1.0, 10, 20_000)
    np.testing.assert_allclose(lams, ref, rtol=1e-5)


def test_solve_range_fills_negative_from_oracle():
    recs = solve_range(Potential.constant(-10), 4)
    assert [r.method for r in recs] == ["oracle", "shooting", "shooting", "shooting"]
    assert recs[0].lambda_n == pytest.approx(PI2 - 10, rel=1e-8)
    assert recs[0].residual is None and recs[0].z_n is None
    recs = solve_range(Potential.constant(-3), 3, DN)
    assert recs[0].method == "oracle"
    assert recs[0].lambda_n == pytest.approx(PI2 / 4 - 3, rel=1e-8)


def test_dirichlet_neumann_free_case():
    for ell in (1.0, 0.6):
        p = Potential.constant(0).with_domain_end(ell)
        lams = eigenvalues(p, 6, DN, ell)
        expected = [((2 * n - 1) * math.pi / (2 * ell)) ** 2 for n in range(1, 7)]
        np.testing.assert_allclose(lams, expected, rtol=1e-8)


@pytest.mark.parametrize("p", [Potential.barrier_sin(-5, 4), Potential.ramp(-2, 2),
                               Potential.constant(-1), random_barrier(3)])
def test_residual_certificate_and_interlacing(p):
    q_min = min_max(p)[0]
    for r in solve_range(p, 8):
        assert r.residual <= 1e-9
        assert abs(phase_at(p, r.z_n) - r.n * math.pi) <= 1e-9
        free = (r.n * math.pi) ** 2
        assert free + q_min - 1e-9 * free <= r.lambda_n <= free * (1 + 1e-12)


@pytest.mark.parametrize("p", [Potential.barrier_sin(-5, 4), Potential.ramp(-5, 5),
                               random_barrier(7)])
def test_lambda1_decreases_with_interval(p):
    lams = [solve_one(p, 1, D, ell).lambda_n for ell in np.linspace(0.3, 1.0, 8)]
    assert all(b < a for a, b in zip(lams, lams[1:]))


def test_domain_checks(zero):
    with pytest.raises(ValueError):
        solve_one(zero, 0)
    with pytest.raises(ValueError):
        solve_range(zero, 0)
    with pytest.raises(ValueError):
        phase_at(zero.with_domain_end(0.5), 1.0, 0.7)


def test_unattainable_residual_raises():
    with pytest.raises(IntegrationError, match="residual"):
        solve_one(Potential.poly([0, 1e10]), 1)
