"""Self-consistency of the brute-force referees.

Cross-checks against the fast engines live with the engines; here the dense
matrix, the mode grid, and the quadrature referees must agree among
themselves and reject bad input.
"""

import math

import numpy as np
import pytest

from sphbath import oracle
from sphbath._aux import kappa_gauss_factor
from sphbath.kernel import k_tilde
from sphbath.params import ClassicalParams, ValidationError

P1 = ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=9)


def test_dense_matrix_layout():
    sys = oracle.build_dense_coupling(4, P1)
    C = sys.coupling
    assert np.allclose(C, C.T)
    M = P1.M
    # spatial neighbor, same slice
    assert C[0, M] == P1.K
    assert C[0, 3 * M] == P1.K
    assert C[0, 2 * M] == 0.0
    # same site, adjacent slice: Kperp plus the rho = 1 bath weight
    w1 = P1.Kperp + P1.alpha * (math.pi / M) ** 2 / math.sin(math.pi / M) ** 2
    assert math.isclose(C[0, 1], w1, rel_tol=1e-14)
    assert C[0, 0] == 0.0


def test_dense_eigenvalues_match_mode_grid():
    p = ClassicalParams(d=2, K=0.2, Kperp=0.8, alpha=0.3, h=0.0, M=5)
    sys = oracle.build_dense_coupling(4, p)
    eig = np.sort(oracle.coupling_eigenvalues(sys))
    grid = np.sort(oracle.ktilde_grid(4, p))
    assert np.max(np.abs(eig - grid)) < 1e-10 * max(1.0, np.max(np.abs(grid)))


def test_ktilde_grid_enumerates_k_tilde():
    p = ClassicalParams(d=2, K=0.2, Kperp=0.8, alpha=0.3, h=0.0, M=5)
    L = 4
    explicit = []
    for ix in range(L):
        for iy in range(L):
            for nu in range(-(p.M // 2), p.M // 2 + 1):
                k = (2 * math.pi * ix / L, 2 * math.pi * iy / L)
                explicit.append(k_tilde(k, nu, p))
    got = np.sort(oracle.ktilde_grid(L, p))
    assert np.allclose(got, np.sort(explicit), rtol=1e-13, atol=1e-13)


def test_degenerate_ring_sizes_keep_spectral_identity():
    # L=1: self-loop of weight 2 (k=0 only); L=2: doubled bond (k = 0, pi)
    for L in (1, 2, 3):
        sys = oracle.build_dense_coupling(L, P1)
        eig = np.sort(oracle.coupling_eigenvalues(sys))
        grid = np.sort(oracle.ktilde_grid(L, P1))
        assert np.allclose(eig, grid, rtol=1e-12, atol=1e-12)


def test_h_brute_equals_dense_trace():
    z = 0.5 * oracle.ktilde_grid(8, P1).max() + 0.4
    sys = oracle.build_dense_coupling(8, P1, z=z)
    row0 = oracle.greens_by_dense_solve(sys, 0)
    # translation invariance: every diagonal entry equals the mode mean
    assert math.isclose(oracle.h_brute_force(z, 8, P1), row0[0], rel_tol=1e-12)


def test_log_det_derivative_is_h():
    z = 0.5 * oracle.ktilde_grid(8, P1).max() + 0.3
    e = 1e-6
    fd = (oracle.log_det_mode_sum(z + e, 8, P1)
          - oracle.log_det_mode_sum(z - e, 8, P1)) / (2 * e)
    assert math.isclose(fd, 2.0 * oracle.h_brute_force(z, 8, P1), rel_tol=1e-8)


def test_dense_validation():
    with pytest.raises(ValidationError):
        oracle.build_dense_coupling(0, P1)
    with pytest.raises(ValidationError):
        oracle.build_dense_coupling(2.0, P1)
    with pytest.raises(ValidationError):
        # 5 * 821 = 4105 crosses the dense cap
        oracle.build_dense_coupling(
            5, ClassicalParams(d=1, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=821))
    sys = oracle.build_dense_coupling(4, P1, z=0.0)
    with pytest.raises(ValidationError):
        oracle.greens_by_dense_solve(sys, 4 * P1.M)
    with pytest.raises(ValidationError):
        oracle.greens_by_dense_solve(sys, -1)
    with pytest.raises(ValidationError):
        oracle.greens_by_dense_solve(sys, 0)  # z = 0: shift not positive definite
    with pytest.raises(ValidationError):
        oracle.h_brute_force(0.0, 4, P1)
    with pytest.raises(ValidationError):
        oracle.log_det_mode_sum(0.0, 4, P1)


def test_riemann_referee_validation_and_refinement():
    with pytest.raises(ValidationError):
        oracle.h_continuum_riemann(0.1, P1, nk=513, nkappa=511)
    with pytest.raises(ValidationError):
        oracle.h_continuum_riemann(
            0.1, ClassicalParams(d=2, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=9))
    vals = [oracle.h_continuum_riemann(0.1, P1, nk=n + 1, nkappa=n)
            for n in (512, 1024, 2048)]
    assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0])


@pytest.mark.parametrize("t,rho", [(0.05, 0.0), (0.5, 3.0), (2.0, 12.0)])
def test_kappa_quadrature_matches_closed_form(t, rho):
    want = kappa_gauss_factor(t, rho, P1.Kperp, P1.alpha)
    got = oracle.kappa_integral_quadrature(t, rho, P1)
    assert abs(got - want) <= 1e-10 * max(abs(want), 1e-12)


def test_continuum_quadrature_validation():
    with pytest.raises(ValidationError):
        oracle.greens_continuum_quadrature(
            0, 0, 0.1, ClassicalParams(d=2, K=0.3, Kperp=1.0, alpha=0.2, h=0.0, M=9))
    with pytest.raises(ValidationError):
        oracle.greens_continuum_quadrature(0, 0, 0.0, P1)
