"""Saddle-point equation of the spherical constraint: engines, solver, free energy.

The constraint reads 1 - (h/u)^2 = H(z) with u = 2z - K~_max.  H is the
mode average of 1/(2z - K~), evaluated by three engines:

  finite-m    exact lattice dispersion, discrete time modes; auxiliary-time
              representation with scaled Bessel factors
  continuum   quadratic-plus-|kappa| gap over the cutoff box
  radial      the dropped-constant radial log integral, scaling fits only

Divergent values are tagged as math.inf, never raised, so phase
classification can branch on them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _aux
from ._kernels import mode_decay_sum
from .kernel import KernelSpectrum
from .params import ClassicalParams, ValidationError

Phase = Literal["paramagnetic", "ferromagnetic", "critical"]

ENGINES = ("finite-m", "continuum")


class RadialDomainWarning(UserWarning):
    """Radial engine evaluated where the log factor changes sign."""


class SolverError(RuntimeError):
    """Bracket expansion or root polishing failed; carries the last bracket."""


@dataclass(frozen=True)
class SaddleSolution:
    z: float
    u: float
    phase: Phase
    m: float
    h_critical_value: float
    residual: float
    engine: str


@dataclass(frozen=True)
class BoundaryPoint:
    alpha: float
    G_c: float
    K_c: float
    bracket_width: float


def ktilde_max_continuum(p: ClassicalParams) -> float:
    """Top of the continuum-engine band: 2dK + 2Kperp + alpha pi^2/3."""
    return 2.0 * p.d * p.K + 2.0 * p.Kperp + p.alpha * math.pi ** 2 / 3.0


def _finite_m_decay(spec: KernelSpectrum):
    """g(t) = ive(0, 2Kt)^d * (1/M) sum_nu e^{-gap_nu t}, the u-independent part."""
    p = spec.params
    d = p.integer_dimension()
    gaps = spec.gaps
    ones = np.ones_like(gaps)

    def g(t: float) -> float:
        spatial = _aux.ive_safe(0, 2.0 * p.K * t) ** d
        return spatial * float(mode_decay_sum(np.array([t]), gaps, ones)[0])

    return g


def _finite_m_tail(p: ClassicalParams, d: int):
    # only the nu=0 mode survives at large t; next order from the Bessel expansion
    c1 = (4.0 * math.pi * p.K) ** (-0.5 * d) / p.M
    return (c1, 0.5 * d, c1 * d / (16.0 * p.K), 0.5 * d + 1.0)


def _finite_m_tail_scale(spec: KernelSpectrum) -> float:
    # tail form valid once Kt >> 1 and every nu != 0 mode has died off
    gaps = np.sort(spec.gaps)
    slowest = 1.0 / gaps[1] if len(gaps) > 1 and gaps[1] > 0.0 else 0.0
    return 100.0 * max(1.0 / spec.params.K, slowest)


def _continuum_tail_scale(p: ClassicalParams) -> float:
    # Kt >> 1 for the box factor; the kappa expansion needs t >> Kperp/alpha^2
    # (alpha > 0) or Kperp t >> 1 (alpha = 0)
    s = 1.0 / p.K
    if p.alpha > 0.0:
        s = max(s, p.Kperp / p.alpha ** 2)
    elif p.Kperp > 0.0:
        s = max(s, 1.0 / p.Kperp)
    return 100.0 * s


def h_finite_m(z: float, spec: KernelSpectrum) -> float:
    """Exact-dispersion H(z); returns inf at the band edge for d <= 2."""
    p = spec.params
    d = p.integer_dimension()
    u = 2.0 * z - spec.ktilde_max
    if u < 0.0:
        raise ValidationError("2z below the top of the coupling band")
    g = _finite_m_decay(spec)
    if u == 0.0:
        return _aux.laplace_integral(g, 0.0, tail=_finite_m_tail(p, d),
                                     t_big=_finite_m_tail_scale(spec))
    return _aux.laplace_integral(g, u)


def _continuum_decay(p: ClassicalParams, d: int):
    def g(t: float) -> float:
        return _aux.erf_box_factor(p.K * t) ** d * _aux.kappa_gauss_factor(
            t, 0.0, p.Kperp, p.alpha)

    return g


def _continuum_tail(p: ClassicalParams, d: int):
    kd = (4.0 * math.pi * p.K) ** (-0.5 * d)
    if p.alpha > 0.0:
        c1 = kd / (math.pi ** 2 * p.alpha)
        c2 = -kd * 2.0 * p.Kperp / (math.pi ** 4 * p.alpha ** 3)
        return (c1, 0.5 * d + 1.0, c2, 0.5 * d + 2.0)
    c1 = kd * (4.0 * math.pi * p.Kperp) ** -0.5
    return (c1, 0.5 * (d + 1.0), 0.0, 0.0)


def h_continuum(u: float, p: ClassicalParams) -> float:
    """Box-regularized continuum H(u); inf tag when the u=0 integral diverges."""
    if u < 0.0:
        raise ValidationError("u must be >= 0")
    d = p.integer_dimension()
    g = _continuum_decay(p, d)
    if u == 0.0:
        return _aux.laplace_integral(g, 0.0, tail=_continuum_tail(p, d),
                                     t_big=_continuum_tail_scale(p))
    return _aux.laplace_integral(g, u)


def delta_h_continuum(u: float, p: ClassicalParams) -> float:
    """H(0) - H(u) without cancellation; finite whenever the gap integral converges."""
    d = p.integer_dimension()
    return _aux.laplace_gap_integral(_continuum_decay(p, d), u,
                                     _continuum_tail(p, d),
                                     t_big=_continuum_tail_scale(p))


def delta_h_finite_m(u: float, spec: KernelSpectrum) -> float:
    """Finite-m H(0) - H(u); inf for d <= 2 where the band-edge value diverges."""
    p = spec.params
    d = p.integer_dimension()
    return _aux.laplace_gap_integral(_finite_m_decay(spec), u,
                                     _finite_m_tail(p, d),
                                     t_big=_finite_m_tail_scale(spec))


def h_radial(u: float, p: ClassicalParams) -> float:
    """(1/alpha) int_0^pi dk k^{d-1} (-ln[Kperp (K k^2 + u) / (pi alpha)^2]).

    Keeps the dropped-constant convention of the radial reduction, so the
    absolute value is not comparable with the other engines; use for
    scaling fits only.  d may be any positive real.
    """
    if p.alpha <= 0.0:
        raise ValidationError("radial engine requires alpha > 0")
    if u < 0.0:
        raise ValidationError("u must be >= 0")
    d = p.d
    if d <= 0.0:
        raise ValidationError("d must be positive")
    c = p.Kperp / (math.pi * p.alpha) ** 2
    if c * (p.K * math.pi ** 2 + u) >= 1.0:
        warnings.warn("log factor changes sign inside the k range; "
                      "scaling fits only", RadialDomainWarning, stacklevel=2)

    def f(k: float) -> float:
        return -(k ** (d - 1.0)) * math.log(c * (p.K * k * k + u))

    val, _ = quad(f, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=500)
    return val / p.alpha


def _h_evaluator(p: ClassicalParams, engine: str):
    """Returns (H(u) callable, ktilde_max) for a solver engine."""
    if engine == "finite-m":
        spec = KernelSpectrum.from_params(p)
        return (lambda u: h_finite_m((u + spec.ktilde_max) / 2.0, spec),
                spec.ktilde_max)
    if engine == "continuum":
        return (lambda u: h_continuum(u, p)), ktilde_max_continuum(p)
    raise ValidationError(f"unknown saddle engine {engine!r}; "
                          f"expected one of {ENGINES}")


def _expand_down(h_of_u, u_hi: float) -> float:
    u_lo = u_hi / 8.0
    for _ in range(300):
        if h_of_u(u_lo) > 1.0:
            return u_lo
        u_lo /= 8.0
    raise SolverError(f"bracket expansion failure; last bracket "
                      f"({u_lo}, {u_hi})")


def _expand_up(f, u_lo: float) -> float:
    u_hi = u_lo * 8.0
    for _ in range(300):
        if f(u_hi) < 0.0:
            return u_hi
        u_hi *= 8.0
    raise SolverError(f"bracket expansion failure; last bracket "
                      f"({u_lo}, {u_hi})")


def solve_saddle(p: ClassicalParams, engine: str = "continuum",
                 tol: float = 1e-8) -> SaddleSolution:
    """Solve the spherical constraint and classify the phase.

    h = 0: compares H at the band edge against 1 (sticking criterion).
    h != 0: unique root of H(u) + (h/u)^2 = 1, bracketed from u = |h|
    where the residual is H > 0, then expanded geometrically upward.
    Root polish is a bracketed solve in ln u; the divergence of H near
    the band edge for d <= 2 makes unbracketed Newton steps unsafe.
    """
    h_of_u, ktmax = _h_evaluator(p, engine)
    h_c = h_of_u(0.0)

    if p.h == 0.0:
        if h_c < 1.0 - tol:
            m = math.sqrt(1.0 - h_c)
            return SaddleSolution(z=ktmax / 2.0, u=0.0, phase="ferromagnetic",
                                  m=m, h_critical_value=h_c, residual=0.0,
                                  engine=engine)
        if h_c <= 1.0 + tol:
            return SaddleSolution(z=ktmax / 2.0, u=0.0, phase="critical",
                                  m=0.0, h_critical_value=h_c,
                                  residual=abs(h_c - 1.0), engine=engine)
        u_hi = max(p.K, p.Kperp, 1e-6)
        for _ in range(300):
            if h_of_u(u_hi) < 1.0:
                break
            u_hi *= 8.0
        else:
            raise SolverError(f"bracket expansion failure; last bracket "
                              f"(0, {u_hi})")
        u_lo = _expand_down(h_of_u, u_hi)
        x = brentq(lambda lu: h_of_u(math.exp(lu)) - 1.0,
                   math.log(u_lo), math.log(u_hi), xtol=1e-14, rtol=8.9e-16,
                   maxiter=300)
        u = math.exp(x)
        return SaddleSolution(z=(u + ktmax) / 2.0, u=u, phase="paramagnetic",
                              m=0.0, h_critical_value=h_c,
                              residual=abs(h_of_u(u) - 1.0), engine=engine)

    def f(u: float) -> float:
        return h_of_u(u) + (p.h / u) ** 2 - 1.0

    u_lo = abs(p.h)  # (h/u)^2 = 1 there, so f = H > 0 always
    u_hi = _expand_up(f, u_lo)
    x = brentq(lambda lu: f(math.exp(lu)), math.log(u_lo), math.log(u_hi),
               xtol=1e-14, rtol=8.9e-16, maxiter=300)
    u = math.exp(x)
    return SaddleSolution(z=(u + ktmax) / 2.0, u=u, phase="paramagnetic",
                          m=p.h / u, h_critical_value=h_c,
                          residual=abs(f(u)), engine=engine)


def free_energy(z: float, p: ClassicalParams, spec: KernelSpectrum) -> float:
    """Free energy per site-slice (times beta/M) at multiplier z.

    The mode-averaged log is computed by the Frullani representation
    <ln X> = int_0^infty dt (e^{-t} - <e^{-X t}>)/t, which reuses the
    auxiliary-time factors and avoids nested k quadrature at any d.
    """
    u = 2.0 * z - spec.ktilde_max
    if u <= 0.0:
        raise ValidationError("2z must be strictly above the coupling band")
    g = _finite_m_decay(spec)

    def integrand(t: float) -> float:
        return (math.exp(-t) - math.exp(-u * t) * g(t)) / t

    t_hi = 150.0 * max(1.0, 1.0 / u)
    logterm = _aux._quad_log(integrand, _aux.T_MIN, t_hi, 1e-13, 1e-12)
    out = -0.5 * math.log(2.0 * math.pi) - z + 0.5 * logterm
    if p.h != 0.0:
        out -= p.h ** 2 / (2.0 * u)
    return out


def magnetization_susceptibility(s: SaddleSolution,
                                 p: ClassicalParams) -> tuple[float, float]:
    """(m, chi) from a solved saddle; chi is inf on the ordered side."""
    if s.phase == "ferromagnetic":
        return s.m, math.inf
    if s.u <= 0.0:
        return s.m, math.inf
    return (p.h / s.u if p.h != 0.0 else 0.0), 1.0 / s.u


def critical_coupling(alpha: float, Kperp: float, d: int,
                      tol: float = 1e-8, M: int = 3) -> BoundaryPoint:
    """Phase-boundary point at fixed (alpha, Kperp): root of H_cont(u=0) = 1 in K.

    H(0) decreases monotonically in K (integrand monotone), diverges as
    K -> 0 and vanishes as K -> infinity, so a geometric expansion always
    brackets the root.
    """
    if alpha <= 0.0:
        raise ValidationError("boundary tracing requires alpha > 0")

    def h_at(K: float) -> float:
        q = ClassicalParams(d=d, K=K, Kperp=Kperp, alpha=alpha, h=0.0, M=M)
        return h_continuum(0.0, q)

    k_lo = k_hi = 1.0
    f0 = h_at(1.0) - 1.0
    if f0 > 0.0:
        for _ in range(300):
            k_hi *= 4.0
            if h_at(k_hi) - 1.0 < 0.0:
                break
        else:
            raise SolverError(f"no sign change while expanding K upward; "
                              f"last bracket ({k_lo}, {k_hi})")
    else:
        for _ in range(300):
            k_lo /= 4.0
            if h_at(k_lo) - 1.0 > 0.0:
                break
        else:
            raise SolverError(f"no sign change while expanding K downward; "
                              f"last bracket ({k_lo}, {k_hi})")
    x = brentq(lambda lk: h_at(math.exp(lk)) - 1.0,
               math.log(k_lo), math.log(k_hi), xtol=1e-13, rtol=8.9e-16,
               maxiter=300)
    K_c = math.exp(x)
    resid = abs(h_at(K_c) - 1.0)
    if resid > tol:
        raise SolverError(f"boundary root residual {resid} above tol {tol}")
    return BoundaryPoint(alpha=alpha, G_c=1.0 / (K_c * Kperp), K_c=K_c,
                         bracket_width=K_c * 1e-13)
