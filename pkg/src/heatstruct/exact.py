"""Closed-form reference profiles and far-field asymptotics.

For beta = sigma + 1, N = 1 the self-similar problem has the explicit
elementary solution

    theta_s(xi) = (2(sigma+1)/(sigma+2) * cos^2(pi xi / L_s))^(1/sigma),
    |xi| <= L_s/2,  zero outside,

with fundamental length L_s = 2 pi sqrt(sigma+1) / sigma.  Adjacent copies of
the elementary solution are again solutions, which provides the multi-bump
initial guesses for S-regime structures.  For beta > sigma + 1 the profiles
have a power tail theta ~ C xi^(-2/(beta-sigma-1)); its logarithmic slope is
independent of the unknown constant C and supplies the Robin condition at the
truncation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .medium import MediumParams


def fundamental_length(sigma: float) -> float:
    """Diameter L_s of the localization region of the S-regime."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    return 2.0 * math.pi * math.sqrt(sigma + 1.0) / sigma


def semi_width_exact(sigma: float) -> float:
    """Half-maximum radius of the elementary solution, L_s arccos(2^(-sigma/2))/pi."""
    return fundamental_length(sigma) * math.acos(2.0 ** (-sigma / 2.0)) / math.pi


@dataclass(frozen=True)
class ZKProfile:
    """Elementary S-regime solution together with its exact geometry."""

    params: MediumParams
    fundamental_length: float
    semi_width: float

    @classmethod
    def for_params(cls, params: MediumParams) -> "ZKProfile":
        if params.dim != 1 or not params.is_s_regime():
            raise ParameterError("the explicit profile requires N = 1 and beta = sigma + 1")
        return cls(
            params=params,
            fundamental_length=fundamental_length(params.sigma),
            semi_width=semi_width_exact(params.sigma),
        )

    def __call__(self, xi):
        return zk_eval(self.params.sigma, xi)


def zk_eval(sigma: float, xi):
    """Evaluate the elementary solution; continuous, zero outside |xi| <= L_s/2."""
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    ls = fundamental_length(sigma)
    xi = np.asarray(xi, dtype=float)
    amp = 2.0 * (sigma + 1.0) / (sigma + 2.0)
    inside = np.abs(xi) <= 0.5 * ls
    c = np.cos(np.pi * xi / ls)
    vals = np.where(inside, (amp * c * c) ** (1.0 / sigma), 0.0)
    if vals.ndim == 0:
        return float(vals)
    return vals


def zk_multibump(sigma: float, k: int, xi):
    """Radial profile built from k abutting elementary solutions.

    The bumps tile the line symmetrically about the origin (centers at
    j*L_s for odd k, at (j + 1/2)*L_s for even k), so the even extension has
    total support of diameter k*L_s and the restriction to xi >= 0 crosses the
    homogeneous level exactly k times.
    """
    if not (isinstance(k, int) and k >= 1):
        raise ParameterError(f"k must be a positive integer, got {k}")
    ls = fundamental_length(sigma)
    xi = np.asarray(xi, dtype=float)
    if k % 2 == 1:
        centers = [j * ls for j in range((k + 1) // 2)]
    else:
        centers = [(j + 0.5) * ls for j in range(k // 2)]
    total = np.zeros_like(xi, dtype=float)
    for c in centers:
        total = total + zk_eval(sigma, xi - c)
    if total.ndim == 0:
        return float(total)
    return total


def ls_tail_slope(params: MediumParams, xi: float, theta: float) -> float:
    """Boundary slope implied by the power tail, -(2/(beta-sigma-1)) * theta / xi.

    The tail constant cancels from the logarithmic derivative, which makes the
    value usable as a Robin condition at the truncation point without knowing
    the profile normalization.
    """
    if not params.beta > params.sigma + 1.0:
        raise ParameterError("the power tail requires beta > sigma + 1")
    if not xi > 0:
        raise ParameterError(f"xi must be > 0, got {xi}")
    if theta < 0:
        raise ParameterError(f"theta must be >= 0, got {theta}")
    return -(2.0 / (params.beta - params.sigma - 1.0)) * theta / xi
