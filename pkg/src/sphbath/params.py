"""Parameter records and the quantum-to-classical coupling map.

The solver works on an effective classical model in d spatial dimensions
plus one periodic imaginary-time direction of M slices.  Quantum inputs
(transverse field A, Ising scale B, exchange J0, longitudinal field h0,
inverse temperature beta, Trotter number M) map onto classical couplings

    K      = (beta/M) * B * J0        spatial nearest-neighbor coupling
    Kperp  = -(1/2) ln tanh(beta*A/M) Trotter (time) nearest-neighbor coupling
    h      = (beta/M) * B * h0        longitudinal field

while the dissipation strength alpha and the dimension d are run
configuration, not products of the map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ValidationError(ValueError):
    """A parameter record or argument violates its invariants."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def require_odd_m(M) -> None:
    """M must be an odd integer >= 3; even M is rejected, never adjusted."""
    _require(isinstance(M, (int,)) and not isinstance(M, bool), "M must be an integer")
    _require(M >= 3 and M % 2 == 1, f"M must be odd (an integer >= 3), got {M}")


@dataclass(frozen=True)
class QuantumParams:
    """Spin-boson chain parameters before the Trotter map.

    A: transverse field (energy); B: Ising scale (energy); J0: dimensionless
    exchange; h0: dimensionless longitudinal field; beta: inverse temperature;
    M: Trotter slices (odd).
    """

    A: float
    B: float
    J0: float
    h0: float
    beta: float
    M: int

    def __post_init__(self):
        for name in ("A", "B", "J0", "beta"):
            _require(getattr(self, name) > 0, f"{name} must be > 0")
        require_odd_m(self.M)


@dataclass(frozen=True)
class ClassicalParams:
    """Native parameter record of the effective classical model.

    d is an integer for the lattice engines but may be any positive real
    for the radial scaling engine.
    """

    d: float
    K: float
    Kperp: float
    alpha: float
    h: float
    M: int

    def __post_init__(self):
        _require(self.d > 0, "d must be > 0")
        _require(self.K > 0, "K must be > 0")
        _require(self.Kperp > 0, "Kperp must be > 0")
        _require(self.alpha >= 0, "alpha must be >= 0")
        require_odd_m(self.M)

    def integer_dimension(self) -> int:
        """d as an int, for engines that walk lattice axes."""
        di = int(round(self.d))
        _require(abs(self.d - di) < 1e-12 and di >= 1,
                 f"this engine needs integer d, got {self.d}")
        return di


@dataclass(frozen=True)
class RegimeReport:
    """Diagnostic for the small-Trotter-step asymptotic regime 1 >> alpha/Kperp >> K/alpha."""

    ratio_alpha_kperp: float
    ratio_k_alpha: float
    small_trotter_ok: bool
    notes: str


def map_quantum_to_classical(q: QuantumParams, d: float, alpha: float) -> ClassicalParams:
    """Translate quantum parameters into classical couplings.

    d and alpha are passed through from run configuration: alpha is an
    independent axis of the phase diagram, not a product of the map.

    Raises ValidationError when beta*A/M is so large that tanh rounds to 1
    in floating point and Kperp would underflow to zero.
    """
    x = q.beta * q.A / q.M
    # -(1/2) ln tanh(x) == atanh(exp(-2x)), which stays accurate for large x
    e = math.exp(-2.0 * x)
    if e == 0.0:
        raise ValidationError(
            f"beta*A/M = {x:g} too large: tanh saturates and Kperp underflows to 0")
    kperp = math.atanh(e)
    scale = q.beta / q.M
    return ClassicalParams(d=d, K=scale * q.B * q.J0, Kperp=kperp,
                           alpha=alpha, h=scale * q.B * q.h0, M=q.M)


def validate_regime(p: ClassicalParams,
                    thresholds: tuple[float, float] = (0.3, 0.3)) -> RegimeReport:
    """Check 1 >> alpha/Kperp >> K/alpha under configurable thresholds.

    Each ">>" reads "smaller/larger <= threshold".  Purely diagnostic; no
    computation is ever blocked on the result.
    """
    t1, t2 = thresholds
    _require(t1 > 0 and t2 > 0, "thresholds must be positive")
    r1 = p.alpha / p.Kperp
    if p.alpha == 0.0:
        return RegimeReport(r1, math.inf, False, "no dissipation (alpha = 0)")
    r2 = p.K / p.alpha
    ok = (r1 <= t1) and (r2 <= t2 * r1)
    if ok:
        notes = "asymptotic regime holds"
    else:
        notes = (f"regime violated: alpha/Kperp = {r1:.3g} (<= {t1:g} wanted), "
                 f"K/alpha = {r2:.3g} (<= {t2:g} * alpha/Kperp = {t2 * r1:.3g} wanted)")
    return RegimeReport(r1, r2, ok, notes)
