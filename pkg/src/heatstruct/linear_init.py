"""Initial approximations for the k-th self-similar structure.

Linearizing the self-similar equation around the homogeneous level theta_H = 1
(convention T0 = 1/(beta-1)) gives, for the perturbation y with theta = 1 + alpha*y,

    -y'' - ((N-1)/xi) y' + m xi y' + (1 - beta) y = 0,   m = (beta-sigma-1)/2.

The solution bounded at the origin with y(0) = 1, y'(0) = 0 is

    y(xi) = 1F1(a, b; z),   a = -(beta-1)/(beta-sigma-1),  b = N/2,
    z = (beta-sigma-1) xi^2 / 4,

for beta != sigma + 1, and the Bessel-type oscillation 0F1(N/2; -sigma xi^2/4)
for beta = sigma + 1.  A guess for the k-th structure keeps the first k
crossings of y with zero, clamps negative values, and sews the power tail
theta ~ C xi^(-2/(beta-sigma-1)) at a point where the logarithmic slopes match.

Series are evaluated by plain Taylor summation with compensated accumulation;
the practical budget covers |z| up to roughly 300, far beyond the xi ranges of
1D-3D desk experiments (xi <= 20 at beta - sigma - 1 <= 3 keeps |z| < 300).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exact
from .errors import ConvergenceError, ParameterError
from .medium import MediumParams, RegimeKind, classify, solution_count

SERIES_BUDGET = 500
_OVERFLOW = 1e290


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) < 1e-12


def _series_sum(coef_step, z, budget=SERIES_BUDGET):
    """Sum sum_j t_j with t_0 = 1, t_j = t_{j-1} * coef_step(j) * z, Kahan style.

    ``z`` may be a scalar or an array; all entries are summed in lockstep and
    convergence requires two consecutive negligible terms past the growth hump.
    """
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    small_streak = 0
    for j in range(1, budget + 1):
        term = term * coef_step(j) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if np.any(np.abs(term) > _OVERFLOW) or np.any(np.abs(total) > _OVERFLOW):
            raise ConvergenceError(f"series overflow at term {j} (|z| ~ {zmax:.3g})")
        if j >= zmax and np.all(np.abs(term) <= 1e-16 * (np.abs(total) + 1e-300)):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise ConvergenceError(
        f"series did not converge within {budget} terms (|z| ~ {zmax:.3g})"
    )


def _kummer_raw(a: float, b: float, z):
    return _series_sum(lambda j: (a + j - 1.0) / ((b + j - 1.0) * j), z)


def kummer_1f1(a: float, b: float, z):
    """Confluent hypergeometric function 1F1(a, b; z) for real parameters.

    Negative arguments are routed through the Kummer transformation
    1F1(a,b;z) = e^z 1F1(b-a, b; -z) to avoid catastrophic cancellation.
    Accepts scalars or arrays of a single sign.
    """
    if _is_nonpositive_integer(b):
        raise ParameterError(f"b must not be a nonpositive integer, got {b}")
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    zarr = np.atleast_1d(zarr)
    out = np.empty_like(zarr)
    neg = zarr < 0
    if np.any(~neg):
        out[~neg] = _kummer_raw(a, b, zarr[~neg])
    if np.any(neg):
        out[neg] = np.exp(zarr[neg]) * _kummer_raw(b - a, b, -zarr[neg])
    return float(out[0]) if scalar else out


def confluent_0f1(b: float, z):
    """Confluent limit function 0F1(; b; z), the Bessel-type oscillation kernel."""
    if _is_nonpositive_integer(b):
        raise ParameterError(f"b must not be a nonpositive integer, got {b}")
    return _series_sum(lambda j: 1.0 / ((b + j - 1.0) * j), z)


_BESSEL_ASYMPTOTIC_CUT = 14.0


def _bessel_series(k: int, z):
    zh = np.asarray(z, dtype=float) / 2.0
    pref = zh**k / math.factorial(k)
    return pref * _series_sum(lambda j: -1.0 / (j * (j + k)), zh * zh)


def _bessel_hankel(k: int, z: float) -> float:
    # large-argument expansion; truncated at the smallest term
    mu = 4.0 * k * k
    omega = z - 0.5 * k * math.pi - 0.25 * math.pi
    p, q = 1.0, 0.0
    term = 1.0
    for m in range(1, 40):
        term *= (mu - (2.0 * m - 1.0) ** 2) / (8.0 * m * z)
        if abs(term) < 1e-17:
            break
        if m % 2 == 1:
            q += term if (m // 2) % 2 == 0 else -term
        else:
            p += term if (m // 2) % 2 == 0 else -term
    return math.sqrt(2.0 / (math.pi * z)) * (math.cos(omega) * p - math.sin(omega) * q)


def bessel_j(k: int, z):
    """Bessel function of the first kind J_k(z) for integer order k >= 0.

    Uses the defining power series for |z| below the cancellation threshold
    and the large-argument expansion beyond it, so the function is total.
    """
    if not (isinstance(k, (int, np.integer)) and k >= 0):
        raise ParameterError(f"order k must be a nonnegative integer, got {k}")
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    zarr = np.atleast_1d(zarr).copy()
    sign = np.where((zarr < 0) & (k % 2 == 1), -1.0, 1.0)
    zabs = np.abs(zarr)
    out = np.empty_like(zabs)
    small = zabs <= _BESSEL_ASYMPTOTIC_CUT
    if np.any(small):
        out[small] = _bessel_series(int(k), zabs[small])
    for i in np.nonzero(~small)[0]:
        out[i] = _bessel_hankel(int(k), float(zabs[i]))
    out *= sign
    return float(out[0]) if scalar else out


def kummer_parameters(params: MediumParams) -> tuple[float, float]:
    """Parameters (a, b) of the linearized-oscillation Kummer function."""
    if params.is_s_regime():
        raise ParameterError("Kummer parameters are defined for beta != sigma + 1")
    a = -(params.beta - 1.0) / (params.beta - params.sigma - 1.0)
    b = 0.5 * params.dim
    return a, b


def _require_normalized_t0(params: MediumParams):
    t0_ref = 1.0 / (params.beta - 1.0)
    if abs(params.t0 - t0_ref) > 1e-12 * t0_ref:
        raise ParameterError(
            "linearization around theta_H = 1 requires T0 = 1/(beta-1); "
            f"got T0 = {params.t0}"
        )


def linearized_profile(params: MediumParams, xi) -> np.ndarray:
    """Bounded-at-origin solution y(xi) of the linearized equation, y(0) = 1."""
    _require_normalized_t0(params)
    xi = np.asarray(xi, dtype=float)
    if params.is_s_regime():
        s = params.sigma
        if params.dim == 1:
            return np.cos(math.sqrt(s) * xi)
        if params.dim == 3:
            w = math.sqrt(s) * xi
            safe = np.where(w == 0.0, 1.0, w)
            return np.where(w == 0.0, 1.0, np.sin(safe) / safe)
        return confluent_0f1(0.5 * params.dim, -0.25 * s * xi * xi)
    a, b = kummer_parameters(params)
    z = 0.25 * (params.beta - params.sigma - 1.0) * xi * xi
    return kummer_1f1(a, b, z)


def linearized_profile_derivative(params: MediumParams, xi) -> np.ndarray:
    """dy/dxi via the contiguous derivative d/dz 1F1(a,b;z) = (a/b) 1F1(a+1,b+1;z)."""
    _require_normalized_t0(params)
    xi = np.asarray(xi, dtype=float)
    if params.is_s_regime():
        # derivative of 0F1(b; -s xi^2/4) is -(s xi / (2 b)) 0F1(b+1; .)
        s = params.sigma
        b = 0.5 * params.dim
        z = -0.25 * s * xi * xi
        return -(s * xi / (2.0 * b)) * confluent_0f1(b + 1.0, z)
    a, b = kummer_parameters(params)
    m = params.m
    z = 0.5 * m * xi * xi
    return (a / b) * kummer_1f1(a + 1.0, b + 1.0, z) * m * xi


@dataclass(frozen=True)
class LinearApproximation:
    """Assembled initial guess theta_0 = clamp(1 + alpha*y) sewn to the power tail.

    ``alpha`` is measured against the oscillation normalized to unit amplitude
    over the region actually used (up to the k-th crossing); ``y_scale`` is the
    normalization factor, so the raw-perturbation amplitude is alpha/y_scale.
    """

    params: MediumParams
    k: int
    alpha: float
    sew_point: float
    values: np.ndarray
    crossings: int
    clamp_interval: tuple[float, float] | None = None
    kummer_a: float | None = None
    kummer_b: float | None = None
    y_scale: float = 1.0

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ParameterError("guess values must be nonnegative")
        if self.crossings != self.k:
            raise ParameterError(
                f"guess has {self.crossings} crossings of theta_H, expected {self.k}"
            )


def count_level_crossings(values, level: float, deadband: float = 1e-8) -> int:
    """Count sign changes of values - level, ignoring a deadband around the level.

    The default deadband sits just above the nodal noise of a converged solve,
    so weakly developed structures near their bifurcation from the homogeneous
    solution (lobe amplitudes down to ~1e-5) are still counted correctly.
    """
    v = np.asarray(values, dtype=float) - level
    signs = np.sign(v[np.abs(v) > deadband])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(signs) != 0))


ALPHA_GRID = tuple(0.1 * j for j in range(1, 10))


def build_guess(
    params: MediumParams,
    k: int,
    mesh,
    alpha: float | None = None,
    slope_match_tol: float = 1.0,
) -> LinearApproximation:
    """Assemble the initial approximation for the k-th self-similar structure.

    S-regime requests are served by the exact multi-bump profiles; LS requests
    use the linearized oscillation with the smallest usable amplitude from the
    standard grid, clamped at zero and sewn to the far-field power tail where
    the logarithmic slopes agree best.  Raises when no sew point brings the
    relative slope mismatch below ``slope_match_tol``.
    """
    if not (isinstance(k, int) and k >= 1):
        raise ParameterError(f"k must be a positive integer, got {k}")
    nodes = np.asarray(getattr(mesh, "nodes", mesh), dtype=float)
    regime = classify(params).kind
    theta_level = params.theta_h

    if regime is RegimeKind.S:
        values = exact.zk_multibump(params.sigma, k, nodes)
        crossings = count_level_crossings(values, theta_level)
        front = 0.5 * k * exact.fundamental_length(params.sigma)
        return LinearApproximation(
            params=params,
            k=k,
            alpha=0.0,
            sew_point=front,
            values=np.asarray(values, dtype=float),
            crossings=crossings,
        )
    if regime is not RegimeKind.LS:
        raise ParameterError(
            f"linearized guesses are provided for the LS and S regimes, not {regime.value}"
        )
    counts = solution_count(params)
    if k > counts.refined:
        raise ParameterError(
            f"k = {k} exceeds the refined solution count {counts.refined}"
        )

    y = linearized_profile(params, nodes)
    dy = linearized_profile_derivative(params, nodes)
    a_kum, b_kum = kummer_parameters(params)
    sign = 1.0 if k % 2 == 1 else -1.0
    magnitudes = (abs(alpha),) if alpha is not None else ALPHA_GRID

    last_failure = "no amplitude produced the required crossing structure"
    for mag in magnitudes:
        alpha_try = sign * mag
        assembled = _assemble_ls_guess(
            params, k, nodes, y, dy, alpha_try, theta_level, slope_match_tol
        )
        if assembled is None:
            last_failure = f"tail matching failed for alpha = {alpha_try:+.2f}"
            continue
        values, sew_point, clamp_interval, y_scale = assembled
        crossings = count_level_crossings(values, theta_level)
        if crossings != k:
            last_failure = (
                f"alpha = {alpha_try:+.2f} yields {crossings} crossings, expected {k}"
            )
            continue
        return LinearApproximation(
            params=params,
            k=k,
            alpha=alpha_try,
            sew_point=sew_point,
            values=values,
            crossings=crossings,
            clamp_interval=clamp_interval,
            kummer_a=a_kum,
            kummer_b=b_kum,
            y_scale=y_scale,
        )
    raise ConvergenceError(f"guess rejected for k = {k}: {last_failure}")


def _assemble_ls_guess(params, k, nodes, y, dy, alpha, theta_level, slope_tol):
    # indices right after each zero of y (= crossing of theta_level by 1 + alpha*y)
    zero_after = np.nonzero(y[:-1] * y[1:] < 0.0)[0] + 1
    if zero_after.size < k:
        return None
    i_start = int(zero_after[k - 1])
    i_stop = int(zero_after[k]) if zero_after.size > k else nodes.size

    # normalize the oscillation over the region actually used, so alpha sets
    # the perturbation size directly (the linearization needs |alpha*y| << 1)
    y_scale = float(np.max(np.abs(y[: i_start + 1])))
    yn = y / y_scale
    dyn = dy / y_scale
    w = 1.0 + alpha * yn
    p = 2.0 / (params.beta - params.sigma - 1.0)

    best = None
    for i in range(i_start, i_stop - 1):
        if w[i] <= 0.0:
            break  # entered the clamp region; no sew point beyond
        if alpha * dyn[i] >= 0.0:
            break  # profile stopped decreasing
        mismatch = (alpha * dyn[i] * nodes[i] / w[i] + p) / p
        if best is None or abs(mismatch) < abs(best[1]):
            best = (i, mismatch)
    if best is None or abs(best[1]) > slope_tol:
        return None
    i_sew, _ = best
    sew_point = float(nodes[i_sew])
    tail_c = w[i_sew] * sew_point**p

    values = np.clip(w, 0.0, None)
    beyond = nodes > sew_point
    values[beyond] = tail_c * nodes[beyond] ** (-p)

    clamp_interval = None
    neg = np.nonzero((w < 0.0) & ~beyond)[0]
    if neg.size:
        clamp_interval = (float(nodes[neg[0]]), float(nodes[neg[-1]]))
    return values, sew_point, clamp_interval, y_scale
