"""Two-point functions on the dissipative torus and their continuum limits.

All engines compute G(r, rho) = <S(0,0) S(r, rho)> at the Gaussian saddle:

  mode-sum      finite L^d x M lattice, exact double mode sum
  infinite-N    L -> infinity: spatial integral replaced by scaled Bessel
                factors under an auxiliary-time integral
  continuum     quadratic-band box propagator, same auxiliary-time device
  dense-oracle  row of the dense inverse (delegates to the oracle module)

The imaginary-time tail machinery (window, plateau, refined alternating
correction) lives in tail_asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _aux
from ._kernels import mode_decay_sum
from .fitting import FitReport, fit_linear
from .kernel import KernelSpectrum
from .params import ClassicalParams, ValidationError, validate_regime

ENGINES = ("mode-sum", "infinite-N", "continuum", "dense-oracle")

Displacement = tuple[tuple[int, ...], int]


@dataclass(frozen=True)
class GreensTable:
    samples: Mapping[Displacement, float]
    engine: str
    z: float
    params: ClassicalParams

    def value(self, r: tuple[int, ...], rho: int) -> float:
        return self.samples[(tuple(r), int(rho))]


@dataclass(frozen=True)
class TailReport:
    window_start: int
    plateau: tuple[tuple[int, float], ...]
    refined_residuals: tuple[float, ...]
    leading_residuals: tuple[float, ...]
    rhos: tuple[int, ...]
    values: tuple[float, ...]
    leading: tuple[float, ...]
    refined: tuple[float, ...]
    multiplier: float


def _as_tuple(r, d: int) -> tuple[int, ...]:
    if isinstance(r, (int, np.integer)):
        r = (int(r),) + (0,) * (d - 1)
    r = tuple(int(a) for a in r)
    if len(r) != d:
        raise ValidationError(f"displacement has {len(r)} components, d = {d}")
    return r


def greens_infinite_n(r, rho: int, z: float, spec: KernelSpectrum) -> float:
    """Exact infinite-N, finite-M Green's function via the auxiliary-time integral.

    G(r,rho) = int_0^inf e^{-ut} prod_a ive(|r_a|, 2Kt) (1/M) sum_nu
    e^{-gap_nu t} cos(kappa_nu rho) dt with u = 2z - K~_max.
    """
    p = spec.params
    d = p.integer_dimension()
    r = _as_tuple(r, d)
    u = 2.0 * z - spec.ktilde_max
    if u <= 0.0:
        raise ValidationError("2z must be strictly above the coupling band")
    weights = np.cos(spec.kappas * (rho % p.M))
    orders = [abs(a) for a in r]

    def g(t: float) -> float:
        spatial = 1.0
        for n in orders:
            spatial *= _aux.ive_safe(n, 2.0 * p.K * t)
        return spatial * float(mode_decay_sum(np.array([t]), spec.gaps, weights)[0])

    return _aux.laplace_integral(g, u)


def greens_mode_sum(r, rho: int, z: float, L: int, spec: KernelSpectrum) -> float:
    """Finite-lattice double mode sum; identical object to the dense inverse."""
    p = spec.params
    d = p.integer_dimension()
    r = _as_tuple(r, d)
    if L % 2 != 0 or L < 2:
        raise ValidationError("L must be a positive even integer")
    ks = 2.0 * math.pi * np.arange(L) / L
    band = 2.0 * p.K * np.cos(ks)
    es = band
    phase = np.exp(1j * ks * r[0])
    for a in range(1, d):
        es = np.add.outer(es, band)
        phase = np.multiply.outer(phase, np.exp(1j * ks * r[a]))
    es = es.ravel()
    phase = phase.ravel()
    top = float(es.max() + spec.lam.max())
    if not 2.0 * z > top:
        raise ValidationError("2z must exceed the largest mode coupling")
    total = 0.0
    for lam_nu, kap_nu in zip(spec.lam, spec.kappas):
        s = np.sum(phase / (2.0 * z - es - lam_nu))
        total += (np.exp(1j * kap_nu * rho) * s).real
    return total / (L ** d * p.M)


def greens_continuum(r, rho: float, u: float, p: ClassicalParams) -> float:
    """Box-regularized continuum propagator, auxiliary-time evaluation.

    Exact rewrite of the (d+1)-dimensional box integral as a single t
    integral of per-axis Gaussian-box factors times the kappa factor;
    the |kappa| kink is inside the closed-form factor, so no oscillatory
    quadrature is needed even at large rho.
    """
    if u <= 0.0:
        raise ValidationError("continuum propagator requires u > 0")
    d = p.integer_dimension()
    r = _as_tuple(r, d)

    def g(t: float) -> float:
        spatial = 1.0
        for a in r:
            spatial *= _aux.gauss_box_factor(p.K * t, float(a))
        return spatial * _aux.kappa_gauss_factor(t, float(rho), p.Kperp, p.alpha)

    return _aux.laplace_integral(g, u)


def kappa_erfcx_integral(t: float, rho: int, p: ClassicalParams) -> float:
    """Closed form of int_{-pi}^{pi} (dkappa/2pi) e^{-Kperp t kappa^2 - pi alpha t |kappa|} cos(kappa rho)."""
    if t <= 0.0:
        raise ValidationError("t must be positive")
    return _aux.kappa_gauss_factor(t, float(rho), p.Kperp, p.alpha)


def build_table(engine: str, displacements: Sequence[Displacement],
                p: ClassicalParams, *, z: float | None = None,
                u: float | None = None, L: int | None = None,
                spec: KernelSpectrum | None = None) -> GreensTable:
    """Evaluate one engine over a displacement list and freeze the result."""
    if engine not in ENGINES:
        raise ValidationError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    d = p.integer_dimension()
    disp = [(_as_tuple(r, d), int(rho)) for r, rho in displacements]

    if engine == "continuum":
        if u is None:
            if z is None:
                raise ValidationError("continuum engine needs u (or z)")
            from .saddle import ktilde_max_continuum
            u = 2.0 * z - ktilde_max_continuum(p)
        zz = z if z is not None else 0.0
        samples = {(r, rho): greens_continuum(r, rho, u, p) for r, rho in disp}
        return GreensTable(samples=samples, engine=engine, z=zz, params=p)

    if spec is None:
        spec = KernelSpectrum.from_params(p)
    if z is None:
        if u is None:
            raise ValidationError("lattice engines need z (or u)")
        z = (u + spec.ktilde_max) / 2.0

    if engine == "infinite-N":
        samples = {(r, rho): greens_infinite_n(r, rho, z, spec) for r, rho in disp}
    elif engine == "mode-sum":
        if L is None:
            raise ValidationError("mode-sum engine needs L")
        samples = {(r, rho): greens_mode_sum(r, rho, z, L, spec) for r, rho in disp}
    else:  # dense-oracle
        if L is None:
            raise ValidationError("dense-oracle engine needs L")
        from . import oracle
        sys = oracle.build_dense_coupling(L, p, z=z)
        col = oracle.greens_by_dense_solve(sys, 0)
        samples = {}
        for r, rho in disp:
            site = 0
            for a in r:
                site = site * L + (a % L)
            samples[(r, rho)] = float(col[site * p.M + (rho % p.M)])
    return GreensTable(samples=samples, engine=engine, z=z, params=p)


def fit_correlation_length(table: GreensTable,
                           window: tuple[int, int]) -> FitReport:
    """Ornstein-Zernike fit: ln G(r, 0) vs r over [window]; xi_fit = -1/slope."""
    lo, hi = int(window[0]), int(window[1])
    p = table.params
    d = p.integer_dimension()
    rs, gs = [], []
    for (r, rho), gval in table.samples.items():
        if rho != 0 or any(a != 0 for a in r[1:]):
            continue
        if lo <= r[0] <= hi and gval > 0.0:
            rs.append(r[0])
            gs.append(gval)
    if len(rs) < 4:
        raise ValidationError(f"fit window [{lo}, {hi}] holds {len(rs)} points; "
                              "need at least 4")
    order = np.argsort(rs)
    rs = np.asarray(rs, dtype=float)[order]
    gs = np.asarray(gs, dtype=float)[order]
    slope, intercept, rms = fit_linear(rs, np.log(gs))
    xi_fit = -1.0 / slope
    regime = validate_regime(p)
    return FitReport(slope=slope, intercept=intercept, window=(float(lo), float(hi)),
                     residual_rms=rms, engine=table.engine,
                     regime_ok=regime.small_trotter_ok, n_points=len(rs),
                     derived={"xi_fit": xi_fit})


def tail_window_start(u: float, p: ClassicalParams, multiplier: float = 10.0) -> int:
    """Smallest rho with u*rho >= multiplier * pi (2Kperp + alpha)."""
    if u <= 0.0:
        raise ValidationError("tail window needs u > 0")
    return math.ceil(multiplier * math.pi * (2.0 * p.Kperp + p.alpha) / u)


def tail_asymptotics(table: GreensTable, s, p: ClassicalParams,
                     multiplier: float = 10.0) -> TailReport:
    """Power-law tail report for G(0, rho) against the dissipative formulas.

    leading:  alpha / (u rho)^2
    refined:  leading - (-1)^rho (2Kperp + alpha) / ([u + pi^2(Kperp + alpha)] rho)^2
    """
    if p.alpha <= 0.0:
        raise ValidationError("no dissipative tail at alpha = 0")
    u = s.u
    if not u > 0.0:
        raise ValidationError("tail analysis is paramagnetic-only (u > 0)")
    start = tail_window_start(u, p, multiplier)
    rows = []
    for (r, rho), gval in table.samples.items():
        if any(a != 0 for a in r) or rho < start:
            continue
        rows.append((rho, gval))
    if not rows:
        raise ValidationError(f"no samples with rho >= {start}; extend the table")
    rows.sort()
    rhos = np.array([row[0] for row in rows], dtype=float)
    vals = np.array([row[1] for row in rows])
    lead = p.alpha / (u * rhos) ** 2
    sign = np.where(np.asarray(rhos, dtype=int) % 2 == 0, 1.0, -1.0)
    shifted = u + math.pi ** 2 * (p.Kperp + p.alpha)
    refined = lead - sign * (2.0 * p.Kperp + p.alpha) / (shifted * rhos) ** 2
    plateau = tuple((int(rho), float(v * rho ** 2 * u ** 2 / p.alpha))
                    for rho, v in zip(rhos, vals))
    return TailReport(
        window_start=start,
        plateau=plateau,
        refined_residuals=tuple(float(x) for x in vals - refined),
        leading_residuals=tuple(float(x) for x in vals - lead),
        rhos=tuple(int(x) for x in rhos),
        values=tuple(float(x) for x in vals),
        leading=tuple(float(x) for x in lead),
        refined=tuple(float(x) for x in refined),
        multiplier=multiplier,
    )
