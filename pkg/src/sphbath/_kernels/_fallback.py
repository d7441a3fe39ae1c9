"""Pure-Python/numpy implementations of the hot numerical kernels.

Mirrors the API of the compiled core exactly; selected automatically when
the extension is unavailable (or when SPHBATH_PURE=1).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def s_sum(nu: int, M: int) -> float:
    """Long-range imaginary-time coupling sum

        S_nu = (pi/M)^2 sum_{rho=1}^{(M-1)/2} cos(2 pi nu rho / M) / sin^2(pi rho / M)

    Compensated summation: the rho=1 term dominates the rest by ~M^2, so a
    naive left-to-right sum loses digits at large M.
    """
    pref = (math.pi / M) ** 2
    c = 2.0 * math.pi * nu / M
    s = math.pi / M
    return pref * math.fsum(
        math.cos(c * r) / math.sin(s * r) ** 2 for r in range(1, (M - 1) // 2 + 1)
    )


def s_table_half(M: int) -> np.ndarray:
    """S_nu for nu = 0 .. (M-1)/2, Kahan-compensated along the rho axis."""
    half = (M - 1) // 2
    nus = np.arange(half + 1, dtype=np.float64)
    pref = (math.pi / M) ** 2
    total = np.zeros(half + 1)
    carry = np.zeros(half + 1)
    for r in range(1, half + 1):
        term = np.cos((2.0 * math.pi * r / M) * nus) / math.sin(math.pi * r / M) ** 2
        y = term - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return pref * total


def kappa_box(A: float, Kperp: float, alpha: float) -> float:
    """Closed form of the box-cutoff time-direction propagator integral

        (1/pi) * int_0^pi dk / (Kperp k^2 + pi alpha k + A)
          == int_{-pi}^{pi} (dk/2pi) / (A + Kperp k^2 + pi alpha |k|).

    A = 0 with alpha > 0 diverges logarithmically -> returns inf.
    Stable in all discriminant branches (the b - sqrt(b^2-4ac) cancellation
    is rewritten via (b+s)^2/(4ac)).
    """
    a = Kperp
    b = math.pi * alpha
    c = A
    if c == 0.0:
        return math.inf
    disc = b * b - 4.0 * a * c
    two_api_b = 2.0 * a * math.pi + b
    if disc < 0.0:
        s = math.sqrt(-disc)
        j = 2.0 / s * (math.atan2(two_api_b, s) - math.atan2(b, s))
    elif disc > 0.0:
        s = math.sqrt(disc)
        j = math.log((two_api_b - s) * (b + s) ** 2 / ((two_api_b + s) * 4.0 * a * c)) / s
    else:
        j = 2.0 / b - 1.0 / (a * math.pi + 0.5 * b)
    return j / math.pi


def kappa_box_many(A, Kperp: float, alpha: float):
    """Vectorized kappa_box over an array of gap values A (all > 0)."""
    A = np.asarray(A, dtype=np.float64)
    a = Kperp
    b = math.pi * alpha
    two_api_b = 2.0 * a * math.pi + b
    disc = b * b - 4.0 * a * A
    out = np.empty_like(A)
    neg = disc < 0.0
    s = np.sqrt(-disc[neg])
    out[neg] = 2.0 / s * (np.arctan2(two_api_b, s) - np.arctan2(b, s))
    pos = disc > 0.0
    s = np.sqrt(disc[pos])
    out[pos] = np.log(
        (two_api_b - s) * (b + s) ** 2 / ((two_api_b + s) * 4.0 * a * A[pos])) / s
    zero = disc == 0.0
    out[zero] = 2.0 / b - 1.0 / (a * math.pi + 0.5 * b)
    return out / math.pi


def mode_decay_sum(ts, gaps, weights) -> np.ndarray:
    """(1/M) sum_nu w_nu exp(-gap_nu * t) for each t in ts.

    gaps are nonnegative; M is inferred as len(gaps).
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    ex = np.exp(-np.outer(ts, np.asarray(gaps, dtype=np.float64)))
    return ex @ np.asarray(weights, dtype=np.float64) / len(gaps)
