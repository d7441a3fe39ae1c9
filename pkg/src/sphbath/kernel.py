"""Coupling kernel of the effective classical model.

Spatial part: nearest-neighbor coupling K on a d-dimensional hypercubic
lattice.  Imaginary-time part on the M-slice ring: nearest-neighbor Kperp
plus the long-range Ohmic-bath coupling alpha (pi/M)^2 / sin^2(pi rho / M).

Fourier transform over the lattice and the slice ring:

    K~(k, kappa_nu) = 2 K sum_a cos k_a + lambda_nu,
    lambda_nu       = 2 Kperp cos kappa_nu + 2 alpha S_nu,
    kappa_nu        = 2 pi nu / M,

with S_nu the dissipative sum computed exactly (s_exact) or by its
large-M asymptotic form pi^2 (1/6 - |nu|/M) (s_asymptotic).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import ClassicalParams, ValidationError, require_odd_m


def minimal_image(rho: int, M: int) -> int:
    """Symmetric representative of a slice displacement in [-(M-1)/2, (M-1)/2]."""
    r = rho % M
    return r - M if r > (M - 1) // 2 else r


def dissipative_weight(rho: int, p: ClassicalParams) -> float:
    """Pair coupling between slices rho apart: alpha (pi/M)^2 / sin^2(pi|rho|/M).

    M-periodic and even in rho.  rho = 0 (mod M) has no pair coupling.
    """
    r = abs(minimal_image(rho, p.M))
    if r == 0:
        raise ValidationError("rho = 0 (mod M): self-coupling undefined")
    return p.alpha * (math.pi / p.M) ** 2 / math.sin(math.pi * r / p.M) ** 2


def s_exact(nu: int, M: int) -> float:
    """Exact O(M) evaluation of S_nu; periodic in nu (period M) and even."""
    require_odd_m(M)
    n = abs(minimal_image(nu, M))
    return _kernels.s_sum(n, M)


def s_asymptotic(nu: int, M: int) -> float:
    """Large-M form S_nu = pi^2 (1/6 - |nu|/M), valid for |nu| <= (M-1)/2.

    The error is O(1/M^2) for fixed nu.
    """
    require_odd_m(M)
    if abs(nu) > (M - 1) // 2:
        raise ValidationError(f"|nu| = {abs(nu)} outside the mode range of M = {M}")
    return math.pi ** 2 * (1.0 / 6.0 - abs(nu) / M)


@dataclass(frozen=True)
class KernelSpectrum:
    """Precomputed imaginary-time eigenvalue table, shared read-only by engines.

    lam[j] = lambda_nu for nu = j - (M-1)/2, nu in [-(M-1)/2, (M-1)/2].
    gaps = lambda_0 - lambda_nu >= 0.  ktilde_max = K~(0,0) = 2 d K + lambda_0.
    """

    params: ClassicalParams
    nus: np.ndarray
    kappas: np.ndarray
    lam: np.ndarray
    gaps: np.ndarray
    ktilde_max: float

    @classmethod
    def from_params(cls, p: ClassicalParams) -> "KernelSpectrum":
        M = p.M
        half = (M - 1) // 2
        s_half = _kernels.s_table_half(M)
        s_all = np.concatenate([s_half[::-1], s_half[1:]])  # nu = -half .. half
        nus = np.arange(-half, half + 1)
        kappas = 2.0 * math.pi * nus / M
        lam = 2.0 * p.Kperp * np.cos(kappas) + 2.0 * p.alpha * s_all
        lam0 = lam[half]
        spec = cls(params=p, nus=nus, kappas=kappas, lam=lam,
                   gaps=lam0 - lam, ktilde_max=2.0 * p.d * p.K + lam0)
        for arr in (spec.nus, spec.kappas, spec.lam, spec.gaps):
            arr.flags.writeable = False
        return spec

    def lambda_of(self, nu: int) -> float:
        half = (self.params.M - 1) // 2
        n = minimal_image(nu, self.params.M)
        return float(self.lam[n + half])


def k_tilde(k, nu: int, p: ClassicalParams) -> float:
    """Fourier transform K~(k, kappa_nu) of the coupling kernel.

    k is a scalar (d=1) or a length-d sequence of wavevector components.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=np.float64))
    d = p.integer_dimension()
    if ks.size != d:
        raise ValidationError(f"wavevector has {ks.size} components, d = {d}")
    lam = 2.0 * p.Kperp * math.cos(2.0 * math.pi * nu / p.M) + 2.0 * p.alpha * s_exact(nu, p.M)
    return 2.0 * p.K * float(np.sum(np.cos(ks))) + lam


def near_critical_gap(k, kappa: float, p: ClassicalParams) -> float:
    """Small-(k, kappa) gap K~(0,0) - K~(k,kappa) ~= K k^2 + Kperp kappa^2 + pi alpha |kappa|.

    The |kappa| term is the non-analytic Ohmic signature; this is the form
    all continuum-engine integrands are built from.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=np.float64))
    return (p.K * float(np.sum(ks * ks))
            + p.Kperp * kappa * kappa
            + math.pi * p.alpha * abs(kappa))
