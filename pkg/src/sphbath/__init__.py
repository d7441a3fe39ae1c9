"""Exact solver for the dissipative spherical model.

Large-n transverse-field lattice model coupled to an Ohmic bath, mapped
to a (d+1)-dimensional classical spherical model with M Trotter slices
and a long-range sin^-2 imaginary-time coupling.  The package computes
the kernel spectrum, solves the spherical-constraint saddle point,
evaluates two-point functions by several independent engines, traces the
phase boundary, and extracts critical exponents, with brute-force
referees for every closed form.
"""

__version__ = "0.1.0"

from .correlators import (GreensTable, TailReport, build_table,
                          fit_correlation_length, greens_continuum,
                          greens_infinite_n, greens_mode_sum,
                          kappa_erfcx_integral, tail_asymptotics)
from .criticality import (ExponentSet, epsilon_expansion_nu, exponent_table,
                          gap_scaling_fit, numeric_exponent_fits, u_versus_g)
from .fitting import FitReport
from .kernel import (KernelSpectrum, dissipative_weight, k_tilde,
                     near_critical_gap, s_asymptotic, s_exact)
from .params import (ClassicalParams, QuantumParams, RegimeReport,
                     ValidationError, map_quantum_to_classical,
                     validate_regime)
from .saddle import (BoundaryPoint, SaddleSolution, SolverError,
                     critical_coupling, free_energy, h_continuum, h_finite_m,
                     h_radial, magnetization_susceptibility, solve_saddle)

__all__ = [
    "__version__",
    "QuantumParams", "ClassicalParams", "RegimeReport", "ValidationError",
    "map_quantum_to_classical", "validate_regime",
    "KernelSpectrum", "dissipative_weight", "s_exact", "s_asymptotic",
    "k_tilde", "near_critical_gap",
    "SaddleSolution", "BoundaryPoint", "SolverError",
    "h_finite_m", "h_continuum", "h_radial", "solve_saddle", "free_energy",
    "magnetization_susceptibility", "critical_coupling",
    "GreensTable", "TailReport", "greens_infinite_n", "greens_mode_sum",
    "greens_continuum", "kappa_erfcx_integral", "build_table",
    "fit_correlation_length", "tail_asymptotics",
    "ExponentSet", "exponent_table", "gap_scaling_fit", "u_versus_g",
    "numeric_exponent_fits", "epsilon_expansion_nu", "FitReport",
]
