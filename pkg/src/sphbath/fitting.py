"""Small least-squares helpers and the report record shared by all fit ops."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .params import ValidationError


@dataclass(frozen=True)
class FitReport:
    """Result of a one-dimensional least-squares fit.

    `window` is the abscissa range the fit ran on (in the natural variable
    of the op, not its log).  `regime_ok` carries the parameter-regime
    flag of the underlying run so downstream consumers can discount fits
    taken outside the small-Trotter window.
    """

    slope: float
    intercept: float
    window: tuple[float, float]
    residual_rms: float
    engine: str
    regime_ok: bool
    n_points: int = 0
    derived: Mapping[str, float] = field(default_factory=dict)


def fit_linear(x, y) -> tuple[float, float, float]:
    """Least-squares line y = slope*x + intercept; returns (slope, intercept, rms)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValidationError("linear fit needs at least 2 points")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def fit_power_law(x, y) -> tuple[float, float, float]:
    """Fit y = A x^p by a line in log-log; returns (p, ln A, rms of ln-residuals)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValidationError("power-law fit requires positive data")
    return fit_linear(np.log(x), np.log(y))
