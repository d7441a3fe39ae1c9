"""Kernel checks.

The referee here is the closed finite sum

    sum_{rho=1}^{M-1} cos(2 pi nu rho / M) / sin^2(pi rho / M) = (M^2-1)/3 - 2 nu (M - nu)

for 0 <= nu <= M-1, which makes S_nu = pi^2 [ (1 - 1/M^2)/6 - n/M + (n/M)^2 ]
with n the minimal image of |nu|.  That pins s_exact to machine precision and
turns the asymptotic error into an exact quantity, pi^2 (n^2 - 1/6) / M^2.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphbath.kernel import (KernelSpectrum, dissipative_weight, k_tilde,
                            minimal_image, near_critical_gap, s_asymptotic,
                            s_exact)
from sphbath.params import ClassicalParams, ValidationError

PI2 = math.pi ** 2


def s_closed(nu: int, M: int) -> float:
    n = abs(minimal_image(nu, M))
    return PI2 * ((1.0 - 1.0 / M ** 2) / 6.0 - n / M + (n / M) ** 2)


def test_s_exact_single_term_m3():
    assert math.isclose(s_exact(0, 3), 4.0 * PI2 / 27.0, rel_tol=1e-14)


def test_s_exact_large_m_limit():
    diff = s_exact(0, 1001) - PI2 / 6.0
    # exact finite-M correction is -pi^2 / (6 M^2)
    assert math.isclose(diff, -PI2 / (6.0 * 1001 ** 2), rel_tol=1e-9)
    assert abs(diff) < 2e-6


def test_s_exact_vs_asymptotic_nu1_m101():
    err = abs(s_exact(1, 101) - s_asymptotic(1, 101))
    assert err <= PI2 / 101 ** 2


@given(nu=st.integers(min_value=-3000, max_value=3000),
       M=st.integers(min_value=1, max_value=400).map(lambda k: 2 * k + 1))
@settings(max_examples=200)
def test_s_exact_matches_closed_identity(nu, M):
    assert math.isclose(s_exact(nu, M), s_closed(nu, M), rel_tol=1e-12, abs_tol=1e-12)


@given(nu=st.integers(min_value=-500, max_value=500),
       M=st.integers(min_value=1, max_value=200).map(lambda k: 2 * k + 1))
def test_s_exact_periodic_and_even(nu, M):
    assert s_exact(nu, M) == s_exact(nu + M, M)
    assert s_exact(-nu, M) == s_exact(nu, M)


@pytest.mark.parametrize("M", [101, 201, 401])
@pytest.mark.parametrize("nu", [0, 1, 2, 5])
def test_asymptotic_error_is_exactly_quadratic(nu, M):
    err = s_exact(nu, M) - s_asymptotic(nu, M)
    assert math.isclose(err, PI2 * (nu ** 2 - 1.0 / 6.0) / M ** 2,
                        rel_tol=1e-8, abs_tol=1e-15)


def test_asymptotic_rejects_out_of_range_nu():
    with pytest.raises(ValidationError):
        s_asymptotic(51, 101)
    assert s_asymptotic(50, 101) == PI2 * (1.0 / 6.0 - 50.0 / 101.0)


def test_dissipative_weight_symmetry_and_value():
    p = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=33)
    for rho in range(1, 33):
        assert dissipative_weight(rho, p) == dissipative_weight(33 - rho, p)
    want = 0.2 * (math.pi / 33) ** 2 / math.sin(math.pi / 33) ** 2
    assert math.isclose(dissipative_weight(1, p), want, rel_tol=1e-14)
    with pytest.raises(ValidationError):
        dissipative_weight(0, p)
    with pytest.raises(ValidationError):
        dissipative_weight(66, p)


def test_k_tilde_examples():
    p0 = ClassicalParams(d=2, K=0.4, Kperp=1.3, alpha=0.0, h=0.0, M=11)
    assert math.isclose(k_tilde((0.0, 0.0), 0, p0), 2 * 2 * 0.4 + 2 * 1.3,
                        rel_tol=1e-14)
    p = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=101)
    assert math.isclose(k_tilde(0.0, 0, p), 0.6 + 2.0 + 0.4 * s_exact(0, 101),
                        rel_tol=1e-14)
    # zone corner: cos pi = -1 on every spatial axis, time part untouched
    lam0 = 2.0 * p.Kperp + 2.0 * p.alpha * s_exact(0, p.M)
    assert math.isclose(k_tilde(math.pi, 0, p), -0.6 + lam0, rel_tol=1e-13)


def test_k_tilde_even_and_maximized_at_origin():
    rng = np.random.default_rng(7)
    p = ClassicalParams(d=2, K=0.25, Kperp=0.9, alpha=0.35, h=0.0, M=17)
    top = k_tilde((0.0, 0.0), 0, p)
    for _ in range(50):
        k = rng.uniform(-math.pi, math.pi, size=2)
        nu = int(rng.integers(-8, 9))
        v = k_tilde(k, nu, p)
        assert v <= top + 1e-12
        assert math.isclose(v, k_tilde(-k, -nu, p), rel_tol=1e-13, abs_tol=1e-13)


def test_k_tilde_rejects_wrong_arity():
    p = ClassicalParams(d=2, K=0.25, Kperp=0.9, alpha=0.35, h=0.0, M=17)
    with pytest.raises(ValidationError):
        k_tilde((0.1, 0.2, 0.3), 0, p)


def test_spectrum_lambda_table_matches_k_tilde():
    p = ClassicalParams(d=2, K=0.15, Kperp=1.1, alpha=0.4, h=0.0, M=21)
    spec = KernelSpectrum.from_params(p)
    for j, nu in enumerate(spec.nus):
        want = k_tilde((0.0, 0.0), int(nu), p) - 2 * 2 * p.K
        assert math.isclose(spec.lam[j], want, rel_tol=1e-13)
        assert math.isclose(spec.lambda_of(int(nu)), want, rel_tol=1e-13)
    assert spec.lambda_of(3 + p.M) == spec.lambda_of(3)


def test_spectrum_gaps_and_max():
    p = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=33)
    spec = KernelSpectrum.from_params(p)
    half = (p.M - 1) // 2
    assert spec.gaps[half] == 0.0
    assert np.all(spec.gaps >= 0.0)
    assert spec.lam[half] == spec.lam.max()
    assert math.isclose(spec.ktilde_max, k_tilde(0.0, 0, p), rel_tol=1e-14)
    with pytest.raises(ValueError):
        spec.lam[0] = 0.0  # table is read-only, shared across engines


def test_near_critical_gap_examples():
    p = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=2001)
    assert near_critical_gap(0.0, 0.0, p) == 0.0
    kap = 1e-4
    g = near_critical_gap(0.0, kap, p)
    assert math.isclose(g, math.pi * p.alpha * kap, rel_tol=1e-3)
    assert near_critical_gap(0.0, -kap, p) == g


def test_near_critical_gap_approximates_k_tilde():
    # relative error shrinks with the window: o(gap) as (k, kappa) -> 0
    p = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=2001)
    top = k_tilde(0.0, 0, p)
    rel = []
    for nu, k in ((16, 0.05), (3, 0.01)):
        kappa = 2.0 * math.pi * nu / p.M
        exact = top - k_tilde(k, nu, p)
        approx = near_critical_gap(k, kappa, p)
        rel.append(abs(exact - approx) / exact)
    assert rel[0] < 0.02
    assert rel[1] < rel[0]
