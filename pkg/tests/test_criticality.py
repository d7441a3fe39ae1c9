"""Exponent tables, scaling laws, gap fits, and the end-to-end numeric fits."""

import math

import numpy as np
import pytest

from sphbath import criticality as cr
from sphbath.params import ClassicalParams, ValidationError
from sphbath.saddle import critical_coupling


@pytest.fixture(scope="module")
def boundary():
    return critical_coupling(0.2, 2.0, 1)


@pytest.fixture(scope="module")
def fits(boundary):
    return cr.numeric_exponent_fits(0.2, 2.0, 1, boundary=boundary)


def test_exponent_table_d1():
    t = cr.exponent_table(1.0)
    assert (t.alpha_sh, t.beta_m, t.gamma, t.delta, t.nu, t.eta, t.z_dyn) == \
        (-1.0, 0.5, 2.0, 5.0, 1.0, 0.0, 2.0)


def test_exponent_table_d2_and_clamp():
    t2 = cr.exponent_table(2.0)
    assert (t2.alpha_sh, t2.gamma, t2.delta, t2.nu) == (0.0, 1.0, 3.0, 0.5)
    assert cr.exponent_table(5.0) == t2
    assert cr.exponent_table(2.5) == t2


def test_exponent_table_fractional_d():
    t = cr.exponent_table(0.5)
    assert t.alpha_sh == -3.0 and t.gamma == 4.0 and t.delta == 9.0 and t.nu == 2.0


def test_exponent_table_rejects_nonpositive_d():
    for d in (0.0, -1.0):
        with pytest.raises(ValidationError):
            cr.exponent_table(d)


def test_scaling_laws_hold_identically():
    for d in np.linspace(0.1, 2.0, 20):
        t = cr.exponent_table(float(d))
        assert abs(t.alpha_sh + 2.0 * t.beta_m + t.gamma - 2.0) < 1e-12
        assert abs(t.gamma - t.beta_m * (t.delta - 1.0)) < 1e-12
        assert abs(t.gamma - t.nu * (2.0 - t.eta)) < 1e-12
        assert t.z_dyn + t.eta == 2.0


def test_epsilon_expansion_examples():
    s, e = cr.epsilon_expansion_nu(1e-9)
    assert abs(s - 0.5) < 1e-9 and abs(e - 0.5) < 1e-9
    for eps in (0.05, 0.1, 0.2, 0.3):
        s, e = cr.epsilon_expansion_nu(eps)
        assert abs(e - s) <= eps ** 3
    # epsilon = 1 is the d = 1 boundary: exact nu = 1, series truncates at 7/8
    s, e = cr.epsilon_expansion_nu(1.0)
    assert e == 1.0 and s == 0.875


def test_epsilon_expansion_gap_is_cubic():
    gaps = [cr.epsilon_expansion_nu(eps)[1] - cr.epsilon_expansion_nu(eps)[0]
            for eps in (0.1, 0.2)]
    assert 6.0 < gaps[1] / gaps[0] < 10.0


def test_epsilon_expansion_domain():
    for eps in (0.0, -0.1, 1.1):
        with pytest.raises(ValidationError):
            cr.epsilon_expansion_nu(eps)


def test_gap_fit_continuum_powers():
    p1 = ClassicalParams(d=1, K=0.1, Kperp=1.0, alpha=0.3, h=0.0, M=9)
    f1 = cr.gap_scaling_fit("continuum", p1)
    assert abs(f1.slope - 0.5) < 0.02
    assert f1.derived["expected_power"] == 0.5
    p3 = ClassicalParams(d=3, K=0.1, Kperp=1.0, alpha=0.3, h=0.0, M=9)
    f3 = cr.gap_scaling_fit("continuum", p3)
    assert abs(f3.slope - 1.0) < 0.02
    assert f3.derived["expected_power"] == 1.0


def test_gap_fit_d2_needs_the_log():
    p2 = ClassicalParams(d=2, K=0.1, Kperp=1.0, alpha=0.3, h=0.0, M=9)
    f2 = cr.gap_scaling_fit("continuum", p2)
    assert f2.slope > 0.0  # b, the u ln(1/u) coefficient
    assert f2.derived["log_form_rel_rms"] < 0.2 * f2.derived["power_rel_rms"]


def test_gap_fit_finite_m_is_classical():
    # time modes are gapped at finite M: classical u^{(d-2)/2}, not linear
    p3 = ClassicalParams(d=3, K=0.1, Kperp=1.0, alpha=0.3, h=0.0, M=9)
    f = cr.gap_scaling_fit("finite-m", p3)
    assert abs(f.slope - 0.5) < 0.02
    assert f.derived["expected_power"] == 0.5


def test_gap_fit_rejections():
    p0 = ClassicalParams(d=1, K=0.1, Kperp=1.0, alpha=0.0, h=0.0, M=9)
    with pytest.raises(ValidationError):
        cr.gap_scaling_fit("continuum", p0)
    p1 = ClassicalParams(d=1, K=0.1, Kperp=1.0, alpha=0.3, h=0.0, M=9)
    with pytest.raises(ValidationError):
        cr.gap_scaling_fit("finite-m", p1)  # band edge divergent at d = 1
    with pytest.raises(ValidationError):
        cr.gap_scaling_fit("transfer-matrix", p1)
    with pytest.raises(ValidationError):
        cr.gap_scaling_fit("continuum", p1, u_grid=[0.0, 1e-3])


def test_sweep_rows_are_consistent(boundary):
    bp, rows, excluded = cr.paramagnetic_sweep(0.2, 2.0, 1, boundary=boundary)
    assert excluded == []
    assert len(rows) == cr.DEFAULT_POINTS
    gs = [row["g"] for row in rows]
    us = [row["u"] for row in rows]
    assert all(a < b for a, b in zip(gs, gs[1:]))
    assert all(a < b for a, b in zip(us, us[1:]))  # u -> 0 with g
    for row in rows:
        assert row["chi"] == 1.0 / row["u"]
        assert math.isclose(row["xi"], math.sqrt(row["K"] / row["u"]),
                            rel_tol=1e-14)
        assert row["m"] == 0.0


def test_u_versus_g_d1(boundary):
    fit = cr.u_versus_g(0.2, 2.0, 1, boundary=boundary)
    assert abs(fit.slope - 2.0) <= 0.05
    assert fit.derived["expected"] == 2.0
    assert math.isclose(fit.derived["G_c"], 1.0 / (boundary.K_c * 2.0),
                        rel_tol=1e-14)
    assert "label" not in fit.derived


def test_u_versus_g_d3_mean_field():
    fit = cr.u_versus_g(0.3, 1.0, 3)
    assert abs(fit.slope - 1.0) <= 0.05
    assert fit.derived["expected"] == 1.0
    assert fit.derived["label"] == "mean-field regime"


def test_fit_sharpens_as_window_shrinks(boundary):
    wide = cr.u_versus_g(0.2, 2.0, 1, boundary=boundary)
    narrow = cr.u_versus_g(0.2, 2.0, 1, boundary=boundary,
                           g_grid=np.logspace(-4, -3, 8))
    assert abs(narrow.slope - 2.0) < abs(wide.slope - 2.0)


def test_numeric_exponents_close_to_table(fits):
    table = cr.exponent_table(1.0)
    assert abs(fits["beta"].derived["beta"] - table.beta_m) <= 0.05 * table.beta_m
    assert abs(fits["gamma"].derived["gamma"] - table.gamma) <= 0.05 * table.gamma
    assert abs(fits["nu"].derived["nu"] - table.nu) <= 0.05 * table.nu
    assert abs(fits["delta"].derived["delta"] - table.delta) <= 0.05 * table.delta


def test_numeric_exponents_obey_gamma_beta_delta_relation(fits):
    beta = fits["beta"].derived["beta"]
    gamma = fits["gamma"].derived["gamma"]
    delta = fits["delta"].derived["delta"]
    # gamma = beta (delta - 1) within the combined fit scatter
    combined = (fits["beta"].residual_rms + fits["gamma"].residual_rms
                + fits["delta"].residual_rms + 0.05)
    assert abs(gamma - beta * (delta - 1.0)) <= combined * gamma


def test_numeric_exponents_reject_sparse_grid(boundary):
    with pytest.raises(ValidationError):
        cr.numeric_exponent_fits(0.2, 2.0, 1, g_grid=[1e-3, 2e-3],
                                 boundary=boundary)
