"""Auxiliary-time integration machinery shared by the saddle and correlator engines.

Every propagator integral here is rewritten as a Laplace-type integral

    int_0^infty dt e^{-u t} * g(t),

where g(t) is a product of per-axis box-cutoff Gaussian factors and a
time-direction factor.  g decays only algebraically (t^{-p}), so the
integrals are done on a log-substituted finite interval plus either a
hard exponential cutoff at t = 150/u (certified remainder < e^-150) or a
two-term analytic power tail when u is zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sp
from scipy.integrate import quad

T_MIN = 1e-18
T_BIG = 1e8
_EXP_CUT = 150.0
_SQRT_PI = math.sqrt(math.pi)


def ive_safe(n: int, x: float) -> float:
    """Scaled Bessel I_n(x) e^{-x} for x >= 0, safe at any magnitude.

    scipy's backend returns nan past x ~ 1.2e9; above 1e8 the large-x
    series 1 - (mu-1)/8x + ... (mu = 4n^2) is already exact to machine
    precision for the mode orders used here, so switch over early.
    """
    if x < 1e8:
        return float(sp.ive(n, x))
    mu = 4.0 * float(n) * float(n)
    ix = 1.0 / (8.0 * x)
    corr = 1.0 - (mu - 1.0) * ix * (
        1.0 - (mu - 9.0) * ix / 2.0 * (1.0 - (mu - 25.0) * ix / 3.0))
    return corr / math.sqrt(2.0 * math.pi * x)


def gauss_box_factor(a: float, x: float) -> float:
    """int_{-pi}^{pi} (dk/2pi) e^{-a k^2} cos(k x), the spatial factor per axis.

    Evaluated in scaled form: the naive complete-the-square expression mixes
    e^{-x^2/4a} with erf of complex argument and overflows; here both pieces
    stay bounded for any a > 0 and real x.
    """
    if a < 1e-280:
        if x == 0.0:
            return 1.0
        # integer displacement: box integral of cos(kx) vanishes as a -> 0
        y = math.pi * x
        return math.sin(y) / y if y != 0.0 else 1.0
    sa = math.sqrt(a)
    y = x / (2.0 * sa)
    main = math.exp(-y * y) if y * y < 745.0 else 0.0
    apipi = a * math.pi ** 2
    if apipi > 745.0:
        corr = 0.0
    else:
        w = sp.erfcx(complex(sa * math.pi, y))
        corr = math.exp(-apipi) * (w * np.exp(complex(0.0, -2.0 * sa * math.pi * y))).real
    return (main - corr) / (2.0 * _SQRT_PI * sa)


def kappa_gauss_factor(t: float, rho: float, Kperp: float, alpha: float) -> float:
    """int_{-pi}^{pi} (dkappa/2pi) e^{-Kperp t kappa^2 - pi alpha t |kappa|} cos(kappa rho).

    Closed form via the scaled complementary error function of complex
    argument; both erfcx arguments lie in the right half-plane, so the
    expression is overflow-free for all t > 0.
    """
    s = math.sqrt(4.0 * Kperp * t)
    z1 = complex(math.pi * alpha * t, -rho) / s
    z2 = complex(math.pi * (2.0 * Kperp + alpha) * t, -rho) / s
    decay = math.pi ** 2 * (Kperp + alpha) * t
    if decay > 745.0:
        second = 0.0 + 0.0j
    else:
        second = np.exp(complex(-decay, math.pi * rho)) * sp.erfcx(z2)
    return float((sp.erfcx(z1) - second).real) / (s * _SQRT_PI)


def erf_box_factor(a: float) -> float:
    """gauss_box_factor at x = 0: erf(pi sqrt(a)) / sqrt(4 pi a)."""
    if a < 1e-280:
        return 1.0
    sa = math.sqrt(a)
    return math.erf(math.pi * sa) / (2.0 * _SQRT_PI * sa)


def _quad_log(f, t_lo: float, t_hi: float, epsabs: float, epsrel: float) -> float:
    """Adaptive quadrature of f over [t_lo, t_hi] in log-time coordinates."""

    def integrand(x: float) -> float:
        t = math.exp(x)
        return f(t) * t

    val, _ = quad(integrand, math.log(t_lo), math.log(t_hi),
                  epsabs=epsabs, epsrel=epsrel, limit=1500)
    return val


def power_tail(T: float, c1: float, p1: float, c2: float = 0.0, p2: float = 0.0) -> float:
    """int_T^infty (c1 t^-p1 + c2 t^-p2) dt, requiring p1, p2 > 1."""
    out = c1 * T ** (1.0 - p1) / (p1 - 1.0)
    if c2 != 0.0:
        out += c2 * T ** (1.0 - p2) / (p2 - 1.0)
    return out


def laplace_integral(g, u: float, tail=None, t_big: float = T_BIG,
                     epsabs: float = 1e-13, epsrel: float = 1e-11) -> float:
    """int_0^infty e^{-u t} g(t) dt with algebraic-tail handling.

    u > 0: hard cutoff at t = 150/u (remainder bounded by e^-150 times the
    decreasing tail envelope).  u = 0: requires `tail = (c1, p1, c2, p2)`,
    the two-term large-t expansion of g; integrates to t_big and adds the
    analytic remainder.  Callers must push t_big past every crossover scale
    of g (for the box factors that is t ~ 1/K, where the per-axis factor
    turns Gaussian); below that scale the power form misstates g entirely.
    Returns inf if u = 0 and the tail does not converge.
    """
    if u < 0.0:
        raise ValueError("u must be >= 0")
    if u > 0.0:
        t_hi = _EXP_CUT / u
        return _quad_log(lambda t: math.exp(-u * t) * g(t), T_MIN, t_hi,
                         epsabs, epsrel)
    if tail is None:
        raise ValueError("u = 0 requires tail coefficients")
    c1, p1, c2, p2 = tail
    if p1 <= 1.0:
        return math.inf
    t_hi = max(T_BIG, t_big)
    body = _quad_log(g, T_MIN, t_hi, epsabs, epsrel)
    return body + power_tail(t_hi, c1, p1, c2, p2)


def laplace_gap_integral(g, u: float, tail, t_big: float = T_BIG,
                         epsabs: float = 1e-13, epsrel: float = 1e-11) -> float:
    """int_0^infty (1 - e^{-u t}) g(t) dt, the gap H(0) - H(u) without cancellation.

    The integrand tends to g(t) ~ t^{-p1} at large t, so there is no
    exponential cutoff; the analytic power tail is attached at
    T = max(t_big, 60/u) where 1 - e^{-uT} differs from 1 by < e^-60.
    t_big carries the same crossover-scale duty as in laplace_integral.
    """
    if u < 0.0:
        raise ValueError("u must be >= 0")
    if u == 0.0:
        return 0.0
    c1, p1, c2, p2 = tail
    if p1 <= 1.0:
        return math.inf
    t_hi = max(T_BIG, t_big, 60.0 / u)
    body = _quad_log(lambda t: -math.expm1(-u * t) * g(t), T_MIN, t_hi,
                     epsabs, epsrel)
    return body + power_tail(t_hi, c1, p1, c2, p2)
