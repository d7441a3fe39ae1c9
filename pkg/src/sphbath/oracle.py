"""Brute-force referees: dense coupling matrices, mode sums, and direct quadrature.

Everything here is deliberately independent of the engine modules it
checks.  The only import from the rest of the package is kernel.s_exact
(itself validated against single-term closed forms), used to build the
same dissipative weights the engines claim to diagonalize.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, circulant

from .kernel import KernelSpectrum
from .params import ClassicalParams, ValidationError

DENSE_CAP = 4096


@dataclass(frozen=True)
class DenseSystem:
    """Dense coupling matrix for an L^d x M torus.

    Row index convention: row = (flat spatial site) * M + slice, with the
    spatial site flattened in C order over the d axes.  `coupling` is the
    symmetric matrix K_xy in H = -(1/2) sum_xy K_xy S_x S_y, so its
    eigenvalues are K~(k, kappa_nu) on the discrete grid.
    """

    L: int
    M: int
    d: int
    z: float
    coupling: np.ndarray
    params: ClassicalParams

    @property
    def n(self) -> int:
        return self.L ** self.d * self.M

    def with_z(self, z: float) -> "DenseSystem":
        return dataclasses.replace(self, z=float(z))


def _ring_adjacency(L: int) -> np.ndarray:
    """Periodic one-dimensional nearest-neighbor adjacency, as a circulant.

    Degenerate sizes keep the spectral identity 2 cos k: L=1 gives a
    self-loop of weight 2, L=2 a doubled bond.
    """
    col = np.zeros(L)
    col[1 % L] += 1.0
    col[(L - 1) % L] += 1.0
    return circulant(col)


def _temporal_weights(p: ClassicalParams) -> np.ndarray:
    """First column of the slice-slice circulant: K_perp ring bond plus bath."""
    M = p.M
    w = np.zeros(M)
    if M > 1:
        w[1] += p.Kperp
        w[M - 1] += p.Kperp
    if p.alpha > 0.0:
        rho = np.arange(1, M)
        w[1:] += p.alpha * (math.pi / M) ** 2 / np.sin(math.pi * rho / M) ** 2
    return w


def build_dense_coupling(L: int, p: ClassicalParams, z: float = 0.0,
                         cap: int = DENSE_CAP) -> DenseSystem:
    """Assemble the full (L^d M)^2 coupling matrix for the quadratic form."""
    if not isinstance(L, int) or isinstance(L, bool) or L < 1:
        raise ValidationError("L must be a positive integer")
    d = p.integer_dimension()
    n = L ** d * p.M
    if n > cap:
        raise ValidationError(f"dense system size {n} exceeds cap {cap}")
    T = circulant(_temporal_weights(p))
    ring = _ring_adjacency(L)
    A = np.zeros((L ** d, L ** d))
    for axis in range(d):
        left = np.eye(L ** axis)
        right = np.eye(L ** (d - 1 - axis))
        A += np.kron(np.kron(left, ring), right)
    coupling = p.K * np.kron(A, np.eye(p.M)) + np.kron(np.eye(L ** d), T)
    return DenseSystem(L=L, M=p.M, d=d, z=float(z), coupling=coupling, params=p)


def coupling_eigenvalues(sys: DenseSystem) -> np.ndarray:
    return np.linalg.eigvalsh(sys.coupling)


def greens_by_dense_solve(sys: DenseSystem, row: int) -> np.ndarray:
    """Row of (2z I - K)^{-1} by Cholesky solve; rejects indefinite shifts."""
    n = sys.n
    if not 0 <= row < n:
        raise ValidationError(f"row {row} outside [0, {n})")
    a = 2.0 * sys.z * np.eye(n) - sys.coupling
    try:
        factor = cho_factor(a)
    except LinAlgError as exc:
        raise ValidationError("2z is not above the coupling spectrum") from exc
    e = np.zeros(n)
    e[row] = 1.0
    return cho_solve(factor, e)


def ktilde_grid(L: int, p: ClassicalParams) -> np.ndarray:
    """All K~(k, kappa_nu) over the L-point k grid, unsorted, shape (L^d * M,)."""
    d = p.integer_dimension()
    spec = KernelSpectrum.from_params(p)
    e1 = 2.0 * p.K * np.cos(2.0 * np.pi * np.arange(L) / L)
    es = e1
    for _ in range(d - 1):
        es = np.add.outer(es, e1)
    return (es.reshape(-1, 1) + spec.lam.reshape(1, -1)).ravel()


def h_brute_force(z: float, L: int, p: ClassicalParams) -> float:
    """(1/L^d M) sum over the discrete mode grid of 1/(2z - K~)."""
    vals = ktilde_grid(L, p)
    top = float(vals.max())
    if not 2.0 * z > top:
        raise ValidationError("2z must exceed the largest mode coupling")
    return float(np.mean(1.0 / (2.0 * z - vals)))


def log_det_mode_sum(z: float, L: int, p: ClassicalParams) -> float:
    """(1/L^d M) sum of ln(2z - K~) over the discrete grid; free-energy referee."""
    vals = ktilde_grid(L, p)
    if not 2.0 * z > float(vals.max()):
        raise ValidationError("2z must exceed the largest mode coupling")
    return float(np.mean(np.log(2.0 * z - vals)))


def h_continuum_riemann(u: float, p: ClassicalParams,
                        nk: int = 4097, nkappa: int = 4096) -> float:
    """Midpoint Riemann sum for the d=1 box propagator integral.

    Refinement referee for the adaptive-quadrature engine.  nkappa must be
    even: an odd midpoint count puts a node exactly on the kappa = 0 kink
    and stalls convergence.
    """
    if nkappa % 2 != 0:
        raise ValidationError("nkappa must be even (midpoint off the kink)")
    if p.integer_dimension() != 1:
        raise ValidationError("Riemann referee implemented for d = 1 only")
    dk = 2.0 * math.pi / nk
    dq = 2.0 * math.pi / nkappa
    kap = -math.pi + (np.arange(nkappa) + 0.5) * dq
    kap_term = p.Kperp * kap ** 2 + math.pi * p.alpha * np.abs(kap)
    total = 0.0
    for lo in range(0, nk, 256):
        k = -math.pi + (np.arange(lo, min(lo + 256, nk)) + 0.5) * dk
        denom = u + p.K * k[:, None] ** 2 + kap_term[None, :]
        total += float(np.sum(1.0 / denom))
    return total * dk * dq / (2.0 * math.pi) ** 2


def kappa_integral_quadrature(t: float, rho: float, p: ClassicalParams,
                              panels: int = 250, order: int = 400) -> float:
    """Composite Gauss-Legendre referee for the kappa integral.

    (1/pi) int_0^pi e^{-Kperp t kappa^2 - pi alpha t kappa} cos(kappa rho),
    i.e. the even-symmetry half of the (1/2pi) full-box integral.  Default
    1e5 nodes; panel width keeps the cos(kappa rho) phase advance small
    for rho up to a few hundred.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, math.pi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        kap = mid + half * nodes
        f = np.exp(-p.Kperp * t * kap ** 2 - math.pi * p.alpha * t * kap) * np.cos(kap * rho)
        total += half * float(weights @ f)
    return total / math.pi


def greens_continuum_quadrature(r: float, rho: float, u: float,
                                p: ClassicalParams) -> float:
    """Nested adaptive quadrature referee for the d=1 continuum propagator."""
    from scipy.integrate import quad

    if p.integer_dimension() != 1:
        raise ValidationError("nested-quadrature referee implemented for d = 1 only")
    if u <= 0.0:
        raise ValidationError("u must be positive")

    def inner(k: float) -> float:
        base = u + p.K * k * k

        def f(kap: float) -> float:
            return 1.0 / (base + p.Kperp * kap * kap + math.pi * p.alpha * kap)

        if rho == 0:
            val, _ = quad(f, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=400)
        else:
            val, _ = quad(f, 0.0, math.pi, weight="cos", wvar=float(rho),
                          epsabs=1e-13, epsrel=1e-12, limit=400)
        return val

    if r == 0:
        ov, _ = quad(inner, 0.0, math.pi, epsabs=1e-13, epsrel=1e-11, limit=400)
    else:
        ov, _ = quad(inner, 0.0, math.pi, weight="cos", wvar=float(r),
                     epsabs=1e-13, epsrel=1e-11, limit=400)
    # even symmetry in k and kappa: full-box (1/2pi)^2 integral = (1/pi^2) quarter box
    return ov / math.pi ** 2
