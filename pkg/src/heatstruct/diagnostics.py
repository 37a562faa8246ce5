"""Geometric observables, self-similar representations, and stability verdicts.

A blow-up run is summarized by the amplitude, the semi-width x_s (where the
profile falls to half its center value), the front point x_f (edge of the
support), and the deviation of the rescaled representation

    Theta(t, xi) = u(t, xi * gamma(t)^(-m)) / gamma(t),
    gamma(t) = max_x u(t, x) / max_xi theta_s(xi),

from the reference self-similar profile.  The representation uses only the
computed amplitude ratio, never the (unknown) blow-up time, which is what
makes the structural-stability verdict computable from a single run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InsufficientSeriesError, ParameterError
from .medium import MediumParams


def semi_width(x, u) -> tuple[float, bool]:
    """Half-maximum radius by linear interpolation; (value, well_defined).

    For profiles that are not monotone decaying from a center maximum the
    first crossing is returned and the flag is False.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    peak = u[0]
    half = 0.5 * peak
    below = np.nonzero(u < half)[0]
    if peak <= 0 or below.size == 0:
        return float(x[-1]), False
    i = below[0]
    if i == 0:
        return 0.0, False
    x_s = x[i - 1] + (half - u[i - 1]) * (x[i] - x[i - 1]) / (u[i] - u[i - 1])
    well_defined = bool(np.argmax(u) == 0 and np.all(u[i:] <= half + 1e-12 * peak))
    return float(x_s), well_defined


FRONT_FLOOR = 1e-12


def front_point(x, u) -> tuple[float, bool]:
    """Edge of the numerical support; (value, saturated).

    Returns the largest node with u above the detection floor (the bracket is
    one element wide).  Profiles positive across the whole domain return the
    domain edge with the saturation flag set.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    alive = np.nonzero(u > FRONT_FLOOR)[0]
    if alive.size == 0:
        return 0.0, False
    i = alive[-1]
    if i == u.size - 1:
        return float(x[-1]), True
    return float(x[i]), False


def ss_representation(params: MediumParams, x, u, ref_xi, ref_theta):
    """Rescale a profile onto the reference grid; returns (gamma, Theta)."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    ref_xi = np.asarray(ref_xi, dtype=float)
    ref_theta = np.asarray(ref_theta, dtype=float)
    umax = float(np.max(u))
    if umax <= 0:
        raise ParameterError("representation needs a positive profile")
    gamma = umax / float(np.max(ref_theta))
    xq = ref_xi * gamma ** (-params.m)
    theta = np.interp(xq, x, u, left=u[0], right=0.0) / gamma
    return gamma, theta


def ss_representation_known_t0(params: MediumParams, t: float, x, u, t0: float):
    """Representation built from the known blow-up time: (xi, Theta) pair."""
    if not t < t0:
        raise ParameterError(f"t must be below t0 = {t0}, got {t}")
    s = 1.0 - t / t0
    phi = s ** (-1.0 / (params.beta - 1.0))
    psi = s ** (params.m / (params.beta - 1.0))
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    return x / psi, u / phi


def deviation_norm(ref_theta, theta, support_floor: float = 1e-3) -> float:
    """Relative max-norm of Theta - theta_s on the bulk of the reference.

    The comparison set keeps reference values above ``support_floor`` times
    the peak; the far tail is dominated by interpolation noise.
    """
    ref_theta = np.asarray(ref_theta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    peak = float(np.max(ref_theta))
    mask = ref_theta > support_floor * peak
    return float(np.max(np.abs(theta[mask] - ref_theta[mask])) / peak)


@dataclass
class DiagnosticsSeries:
    """Per-step records of a blow-up run plus optional profile snapshots."""

    t: list = field(default_factory=list)
    umax: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    xf: list = field(default_factory=list)
    domain: list = field(default_factory=list)
    tau: list = field(default_factory=list)
    nnodes: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    dev: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (label, x, u) triples
    reference: tuple | None = None  # (xi, theta) of the self-similar profile

    def append(self, t, umax, xs, xf, domain, tau, nnodes, gamma, dev=np.nan):
        if self.t and t <= self.t[-1]:
            raise ParameterError("time records must be strictly increasing")
        self.t.append(float(t))
        self.umax.append(float(umax))
        self.xs.append(float(xs))
        self.xf.append(float(xf))
        self.domain.append(float(domain))
        self.tau.append(float(tau))
        self.nnodes.append(int(nnodes))
        self.gamma.append(float(gamma))
        self.dev.append(float(dev))

    def __len__(self) -> int:
        return len(self.t)

    def as_arrays(self) -> dict:
        return {
            "t": np.asarray(self.t),
            "umax": np.asarray(self.umax),
            "xs": np.asarray(self.xs),
            "xf": np.asarray(self.xf),
            "X": np.asarray(self.domain),
            "tau": np.asarray(self.tau),
            "nnodes": np.asarray(self.nnodes),
            "gamma": np.asarray(self.gamma),
            "dev": np.asarray(self.dev),
        }


class StabilityKind(Enum):
    STRUCTURALLY_STABLE = "structurally_stable"
    METASTABLE = "metastable"
    DIVERGENT = "divergent"


@dataclass(frozen=True)
class StabilityThresholds:
    """Artifact thresholds for the verdict; none of them is a physical constant."""

    eps: float = 0.05
    gamma_hold: float = 1e3
    growth_min: float = 1e3
    trend_bins: int = 5
    trend_slack: float = 1e-3


@dataclass(frozen=True)
class StabilityVerdict:
    kind: StabilityKind
    hold_until_gamma: float
    final_deviation: float


def stability_verdict(
    series: DiagnosticsSeries,
    reference,
    thresholds: StabilityThresholds = StabilityThresholds(),
) -> StabilityVerdict:
    """Classify a run as structurally stable, metastable, or divergent.

    Structurally stable: over the last decade of amplitude growth the relative
    deviation stays below eps and its binned trend does not increase.
    Metastable: the deviation stays below eps until gamma reaches gamma_hold
    and grows afterwards (the hold point is recorded).  Anything else is
    divergent.  The amplitude-hold threshold is a proxy: the underlying notion
    ("shape preserved until a time close to blow-up") has no quantitative
    constant, so gamma_hold is configurable and reported alongside.
    """
    ref_xi, ref_theta = reference if isinstance(reference, tuple) else (
        reference.mesh.nodes,
        reference.theta,
    )
    # amplitude ratio against the reference peak (not against the run's own
    # initial amplitude): the verdict is about convergence to the reference
    gamma = np.asarray(series.umax, dtype=float) / float(np.max(ref_theta))
    dev = np.asarray(series.dev, dtype=float)
    ok = np.isfinite(dev)
    gamma, dev = gamma[ok], dev[ok]
    if gamma.size < 10:
        raise InsufficientSeriesError("too few deviation records for a verdict")
    growth = gamma[-1] / gamma[0]
    if growth < thresholds.growth_min:
        raise InsufficientSeriesError(
            f"amplitude growth {growth:.3g} below required {thresholds.growth_min:.3g}"
        )

    final_dev = float(dev[-1])
    window = gamma >= gamma[-1] / 10.0
    dev_w, gamma_w = dev[window], gamma[window]
    within = bool(np.max(dev_w) <= thresholds.eps)

    # binned trend over the last decade (log-gamma bins)
    edges = np.geomspace(gamma_w[0], gamma_w[-1], thresholds.trend_bins + 1)
    idx = np.clip(np.searchsorted(edges, gamma_w, side="right") - 1, 0, thresholds.trend_bins - 1)
    means = np.array([dev_w[idx == b].mean() for b in range(thresholds.trend_bins) if np.any(idx == b)])
    nonincreasing = bool(
        np.all(np.diff(means) <= np.maximum(thresholds.trend_slack, 0.05 * means[:-1]))
    )

    if within and nonincreasing:
        return StabilityVerdict(StabilityKind.STRUCTURALLY_STABLE, float(gamma[-1]), final_dev)

    exceeded = np.nonzero(dev > thresholds.eps)[0]
    hold_gamma = float(gamma[-1] if exceeded.size == 0 else gamma[max(exceeded[0] - 1, 0)])
    if hold_gamma >= thresholds.gamma_hold:
        return StabilityVerdict(StabilityKind.METASTABLE, hold_gamma, final_dev)
    return StabilityVerdict(StabilityKind.DIVERGENT, hold_gamma, final_dev)
