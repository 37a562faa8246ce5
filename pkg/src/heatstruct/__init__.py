"""Blow-up structures and waves in a nonlinear heat-conducting medium.

Library layout:

- ``medium``       parameters, regime classification, scaling laws
- ``exact``        explicit S-regime profiles and tail asymptotics
- ``linear_init``  special functions and linearized initial guesses
- ``selfsim``      CANM + Galerkin FEM solver for the self-similar problem
- ``evolve``       lumped-mass FEM evolution to blow-up with mesh adaptation
- ``diagnostics``  self-similar representations and stability verdicts
- ``cli``          experiment runner (`heatstruct` console script)
"""

from .medium import MediumParams, Regime, RegimeKind, classify, scaling_laws, solution_count, theta_h
from .exact import ZKProfile, fundamental_length, ls_tail_slope, semi_width_exact, zk_eval, zk_multibump
from .linear_init import LinearApproximation, bessel_j, build_guess, kummer_1f1, linearized_profile
from .selfsim import CanmOptions, Mesh1D, SelfSimilarSolution, canm_solve, convergence_study, find_structure
from .evolve import BlowupEstimate, EvolveOptions, kirchhoff, run_to_blowup, truncate_support
from .diagnostics import (
    DiagnosticsSeries,
    StabilityKind,
    StabilityThresholds,
    StabilityVerdict,
    front_point,
    semi_width,
    ss_representation,
    ss_representation_known_t0,
    stability_verdict,
)
from .errors import ConvergenceError, DivergenceError, HeatstructError, InsufficientSeriesError, ParameterError

__all__ = [
    "MediumParams",
    "Regime",
    "RegimeKind",
    "classify",
    "scaling_laws",
    "solution_count",
    "theta_h",
    "ZKProfile",
    "fundamental_length",
    "ls_tail_slope",
    "semi_width_exact",
    "zk_eval",
    "zk_multibump",
    "LinearApproximation",
    "bessel_j",
    "build_guess",
    "kummer_1f1",
    "linearized_profile",
    "CanmOptions",
    "Mesh1D",
    "SelfSimilarSolution",
    "canm_solve",
    "convergence_study",
    "find_structure",
    "BlowupEstimate",
    "EvolveOptions",
    "kirchhoff",
    "run_to_blowup",
    "truncate_support",
    "DiagnosticsSeries",
    "StabilityKind",
    "StabilityThresholds",
    "StabilityVerdict",
    "front_point",
    "semi_width",
    "ss_representation",
    "ss_representation_known_t0",
    "stability_verdict",
    "ConvergenceError",
    "DivergenceError",
    "HeatstructError",
    "InsufficientSeriesError",
    "ParameterError",
]

__version__ = "0.1.0"
