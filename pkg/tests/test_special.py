import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrayphg.errors import InsufficientSmoothnessError, PoleError
from xrayphg.special import (
    SymmetricProfile,
    beta_diag,
    beta_diag_residue,
    beta_diag_zero_slope,
    beta_diag_zero_slope_over_pi,
    gamma,
    gen_beta,
    gen_beta_residue,
    log_gamma,
)


def test_log_gamma_examples():
    assert abs(log_gamma(1.0)) < 1e-14
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14
    assert abs(log_gamma(5.0) - math.log(24.0)) < 1e-13


def test_log_gamma_pole_raises():
    with pytest.raises(PoleError):
        log_gamma(-3.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30))
def test_log_gamma_matches_mpmath(x, y):
    z = complex(x, y)
    n = round(-x)
    if n >= 0 and abs(z + n) < 1e-3:
        return
    ours = complex(log_gamma(z))
    ref = complex(mpmath.loggamma(mpmath.mpc(x, y)))
    assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 20))
def test_gamma_matches_mpmath_real(x):
    assert abs(complex(gamma(x)).real / float(mpmath.gamma(x)) - 1) < 1e-12


def test_beta_diag_examples():
    assert abs(beta_diag(1.0).value - 1.0) < 1e-14
    assert abs(beta_diag(0.5).value - math.pi) < 1e-13
    near = beta_diag(1e-8)
    assert near.near_pole is not None
    assert near.near_pole.leading_coefficient == 2


@pytest.mark.parametrize("n, expected", [(0, 2), (1, 4), (2, 12), (3, 40), (4, 140), (5, 504)])
def test_beta_diag_residue(n, expected):
    assert beta_diag_residue(n) == expected == 2 * math.comb(2 * n, n)


@pytest.mark.parametrize("n", range(6))
def test_zero_slope_exact(n):
    q = beta_diag_zero_slope_over_pi(n)
    assert q == -Fraction(4 ** (2 * n + 2), (n + 1) * math.comb(2 * n + 2, n + 1))
    assert beta_diag_zero_slope(n) == pytest.approx(float(q) * math.pi, rel=1e-15)


def test_zero_slope_examples():
    assert beta_diag_zero_slope_over_pi(0) == -8
    assert beta_diag_zero_slope_over_pi(1) == Fraction(-64, 3)


@pytest.mark.parametrize("n", range(6))
def test_zero_slope_finite_difference(n):
    h = 1e-5
    probe = beta_diag(-n - 0.5 + h).value.real / h
    assert abs(probe / beta_diag_zero_slope(n) - 1) < 1e-4


@pytest.mark.parametrize("n", range(6))
def test_half_integer_zeros(n):
    assert abs(beta_diag(-n - 0.5).value) <= 1e-10


def test_beta_diag_residue_matches_laurent_probe():
    for n in range(4):
        h = 1e-4
        probe = 0.5 * (beta_diag(-n + h).value - beta_diag(-n - h).value).real * h
        assert abs(probe / beta_diag_residue(n) - 1) < 1e-6


ONE = SymmetricProfile.constant(1.0)


def test_gen_beta_examples():
    assert abs(gen_beta(ONE, 1.0).value - 1.0) < 1e-12
    assert abs(gen_beta(ONE, 2.0).value - 1.0 / 6.0) < 1e-12
    bump = SymmetricProfile.from_callable(lambda u: u * (1 - u))
    assert abs(gen_beta(bump, 1.0).value - 1.0 / 6.0) < 1e-12


def test_gen_beta_residues():
    assert abs(gen_beta_residue(ONE, 0) - 2.0) < 1e-10
    assert abs(gen_beta_residue(ONE, 1) - 4.0) < 1e-10
    sq = SymmetricProfile.from_callable(lambda u: (u - 0.5) ** 2)
    assert abs(gen_beta_residue(sq, 0) - 0.5) < 1e-10


def test_gen_beta_residue_matches_beta_diag():
    for n in (0, 1):
        assert abs(gen_beta_residue(ONE, n) - beta_diag_residue(n)) <= 1e-8


def test_gen_beta_random_agreement():
    rng = np.random.default_rng(1)
    for _ in range(200):
        z = complex(rng.uniform(0.1, 5.0), rng.uniform(-3.0, 3.0))
        diff = abs(gen_beta(ONE, z).value - beta_diag(z).value)
        assert diff <= 1e-9 * max(1.0, abs(beta_diag(z).value))


def test_gen_beta_continuation_consistency():
    rng = np.random.default_rng(2)
    for _ in range(20):
        z = complex(rng.uniform(-2.0, 0.0), rng.uniform(-1.0, 1.0))
        if abs(z - round(z.real)) < 0.05:
            continue
        a = gen_beta(ONE, z).value
        b = gen_beta(ONE, z, extra_steps=1).value
        assert abs(a - b) <= 1e-8 * max(1.0, abs(a))
        assert abs(a - beta_diag(z).value) <= 1e-8 * max(1.0, abs(a))


def test_gen_beta_continuation_consistency_right_strip():
    for x in np.linspace(0.05, 0.95, 7):
        z = complex(x, 0.3)
        a = gen_beta(ONE, z).value
        b = gen_beta(ONE, z, extra_steps=1).value
        assert abs(a - b) <= 1e-8 * abs(a)


def test_gen_beta_pole_report():
    s = gen_beta(ONE, -1.0 + 1e-8)
    assert s.near_pole is not None and abs(s.near_pole.leading_coefficient - 4.0) < 1e-8


def test_insufficient_smoothness():
    prof = SymmetricProfile.constant(1.0, smoothness_order=2)
    with pytest.raises(InsufficientSmoothnessError):
        gen_beta(prof, -2.5)
    with pytest.raises(InsufficientSmoothnessError):
        gen_beta_residue(prof, 2)


def test_asymmetric_profile_rejected():
    with pytest.raises(ValueError):
        SymmetricProfile.from_callable(lambda u: u)


symmetric_coeffs = st.lists(st.floats(-2, 2), min_size=1, max_size=5)


@settings(max_examples=30, deadline=None)
@given(symmetric_coeffs, st.floats(1.1, 4.0), st.floats(-2.0, 2.0))
def test_recursion_identity(coeffs, x, y):
    z = complex(x, y)

    def f(u):
        w = u * (1 - u)
        return sum(c * w**j for j, c in enumerate(coeffs))

    pf = SymmetricProfile.from_callable(f)
    pg = SymmetricProfile.from_callable(lambda u: (u - 0.5) ** 2 * f(u))
    lhs = gen_beta(pg, z).value
    rhs = 0.25 * gen_beta(pf, z).value - gen_beta(pf, z + 1).value
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(gen_beta(pf, z).value))


@settings(max_examples=20, deadline=None)
@given(symmetric_coeffs, st.floats(0.3, 3.0))
def test_reparametrization_invariance(coeffs, x):
    def f(u):
        w = u * (1 - u)
        return sum(c * w**j for j, c in enumerate(coeffs))

    a = SymmetricProfile.from_callable(f)
    b = SymmetricProfile.from_callable(lambda u: f(1 - u))
    assert abs(gen_beta(a, x).value - gen_beta(b, x).value) <= 1e-12 * max(1.0, abs(gen_beta(a, x).value))


@pytest.mark.parametrize("z", [-0.9914 + 0.4993j, -0.9932 + 0.3594j, -1.995 + 0.2j, 0.004 + 0.7j])
def test_gen_beta_near_left_of_line(z):
    # one step from Re z ≈ -0.99 would leave the base quadrature at Re ≈ 0.01
    ref = beta_diag(z).value
    assert abs(gen_beta(ONE, z).value - ref) <= 1e-10 * max(1.0, abs(ref))
    assert abs(gen_beta(ONE, z, extra_steps=1).value - ref) <= 1e-10 * max(1.0, abs(ref))
