"""Medium parameters, burning-regime classification, and self-similar scaling laws.

The radially symmetric reaction-diffusion problem

    u_t = x^(1-N) (x^(N-1) u^sigma u_x)_x + u^beta,   sigma > 0, beta > 1,

admits a separable blow-up solution u_s(t, x) = phi(t) * theta_s(x / psi(t))
with

    phi(t) = (1 - t/T0)^(-1/(beta-1)),   psi(t) = (1 - t/T0)^(m/(beta-1)),
    m = (beta - sigma - 1) / 2.

Everything downstream (initial guesses, the self-similar BVP solver, the
evolution solver and its mesh adaptation) keys off the triple (sigma, beta, N)
collected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ParameterError

# Regime boundaries are analytic functions of (sigma, beta); config files are
# expected to carry exact floats, so equality is detected at near-machine
# relative tolerance.
REGIME_REL_TOL = 1e-12


class RegimeKind(Enum):
    HS = "HS"
    S = "S"
    LS = "LS"
    BEYOND_FUJITA = "BeyondFujita"


@dataclass(frozen=True)
class MediumParams:
    """Power-law medium (sigma, beta, N) plus the blow-up time convention T0.

    The default t0 = 1/(beta - 1) normalizes the homogeneous solution level
    theta_H to 1; any other positive t0 is allowed and propagates consistently.
    """

    sigma: float
    beta: float
    dim: int = 1
    t0: float = None  # type: ignore[assignment]  # resolved to 1/(beta-1) below

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if not self.beta > 1:
            raise ParameterError(f"beta must be > 1, got {self.beta}")
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise ParameterError(f"dim must be an integer >= 1, got {self.dim}")
        if self.t0 is None:
            object.__setattr__(self, "t0", 1.0 / (self.beta - 1.0))
        elif not self.t0 > 0:
            raise ParameterError(f"t0 must be > 0, got {self.t0}")

    @property
    def m(self) -> float:
        """Spatial self-similarity exponent (beta - sigma - 1) / 2."""
        return 0.5 * (self.beta - self.sigma - 1.0)

    @property
    def theta_h(self) -> float:
        """Level of the homogeneous solution, (T0 (beta - 1))^(-1/(beta-1))."""
        return (self.t0 * (self.beta - 1.0)) ** (-1.0 / (self.beta - 1.0))

    @property
    def beta_fujita(self) -> float:
        return self.sigma + 1.0 + 2.0 / self.dim

    @property
    def beta_sobolev(self) -> float | None:
        """Critical Sobolev exponent (sigma+1)(N+2)/(N-2); defined for N >= 3."""
        if self.dim < 3:
            return None
        return (self.sigma + 1.0) * (self.dim + 2.0) / (self.dim - 2.0)

    @property
    def beta_u(self) -> float | None:
        """Upper critical exponent for monotone profiles; defined for N >= 11."""
        if self.dim < 11:
            return None
        n = self.dim
        return (self.sigma + 1.0) * (1.0 + 4.0 / (n - 4.0 - 2.0 * math.sqrt(n - 1.0)))

    @property
    def beta_p(self) -> float | None:
        """Peletier-type critical exponent; defined for N >= 11."""
        if self.dim < 11:
            return None
        s, n = self.sigma, self.dim
        root = math.sqrt(
            s * s * (n - 10.0) ** 2
            + 2.0 * s * (5.0 * s + 1.0) * (n - 10.0)
            + 9.0 * (s + 1.0) ** 2
        )
        return 1.0 + 3.0 * (s + 1.0) + root / (n - 10.0)

    @property
    def a(self) -> float:
        """Oscillation parameter (beta-1)/(beta-sigma-1); defined for beta > sigma+1."""
        if not self.beta > self.sigma + 1.0:
            raise ParameterError("a = (beta-1)/(beta-sigma-1) requires beta > sigma + 1")
        return (self.beta - 1.0) / (self.beta - self.sigma - 1.0)

    def is_s_regime(self) -> bool:
        gap = abs(self.beta - (self.sigma + 1.0))
        return gap <= REGIME_REL_TOL * max(abs(self.beta), abs(self.sigma + 1.0))


@dataclass(frozen=True)
class Regime:
    """Classification of the burning regime plus critical-exponent flags.

    The flags are None whenever the dimension does not support the respective
    exponent formula (beta_s needs N >= 3, beta_u and beta_p need N >= 11).
    """

    kind: RegimeKind
    beyond_sobolev: bool | None = None
    beyond_u: bool | None = None
    beyond_p: bool | None = None


@dataclass(frozen=True)
class SolutionCount:
    """Number of distinct self-similar functions for beta > sigma + 1.

    ``lower_bound`` evaluates K = -floor(-a) - 1; ``refined`` applies the
    bifurcation-analysis rule (floor(a) for non-integer a, a - 1 for integer
    a).  ``formula_proved`` is False for N > 1, where the same estimate is
    known to fail close to beta = sigma + 1.
    """

    lower_bound: int
    refined: int
    differ: bool
    formula_proved: bool

    def __int__(self) -> int:
        return self.refined


def classify(params: MediumParams) -> Regime:
    """Classify the regime from beta versus sigma+1 versus the Fujita exponent."""
    if params.is_s_regime():
        kind = RegimeKind.S
    elif params.beta < params.sigma + 1.0:
        kind = RegimeKind.HS
    elif params.beta < params.beta_fujita:
        kind = RegimeKind.LS
    else:
        kind = RegimeKind.BEYOND_FUJITA

    beyond_sobolev = None
    if params.beta_sobolev is not None:
        beyond_sobolev = params.beta >= params.beta_sobolev
    beyond_u = None if params.beta_u is None else params.beta >= params.beta_u
    beyond_p = None if params.beta_p is None else params.beta >= params.beta_p
    return Regime(kind, beyond_sobolev, beyond_u, beyond_p)


def solution_count(params: MediumParams) -> SolutionCount:
    """Count the distinct self-similar functions theta_{s,k} for beta > sigma+1."""
    if not params.beta > params.sigma + 1.0:
        raise ParameterError("solution count is defined only for beta > sigma + 1")
    a = params.a
    lower = -math.floor(-a) - 1
    # integer detection guards against float representation of exact ratios
    nearest = round(a)
    if abs(a - nearest) <= 1e-9 * max(1.0, abs(a)):
        refined = nearest - 1
    else:
        refined = math.floor(a)
    return SolutionCount(
        lower_bound=lower,
        refined=refined,
        differ=lower != refined,
        formula_proved=params.dim == 1,
    )


def theta_h(params: MediumParams) -> float:
    """Homogeneous solution level (T0 (beta - 1))^(-1/(beta-1))."""
    return params.theta_h


def scaling_laws(params: MediumParams, t: float) -> tuple[float, float]:
    """Amplitude and width factors (phi(t), psi(t)) of the separable solution."""
    if not 0.0 <= t < params.t0:
        raise ParameterError(f"t must satisfy 0 <= t < T0 = {params.t0}, got {t}")
    s = 1.0 - t / params.t0
    phi = s ** (-1.0 / (params.beta - 1.0))
    psi = s ** (params.m / (params.beta - 1.0))
    return phi, psi
