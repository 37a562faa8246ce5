"""Evolution of the reaction-diffusion problem to blow-up.

Lumped-mass linear finite elements with the Kirchhoff transformation
G(u) = u^(sigma+1)/(sigma+1) reduce the problem on [0, X(t)] to the nodal ODE
system

    dU/dt = M^(-1) (-K G(U)) + q(U),     q(u) = u^beta,

where the stiffness matrix K (weight x^(N-1)) does not depend on the unknown
and the nonlinearity enters only through the two interpolated vectors.  Time
stepping is a two-stage explicit midpoint scheme under a maximum-principle
step bound with accept/reject control; a step is rejected when a nodal value
would turn negative or the amplitude grows more than ten percent at once.

The mesh follows the self-similar law through the amplitude ratio
Gamma(t) = max u / max u_0: single-point blow-up (m > 0) halves elements
whenever dx * Gamma^m would exceed lambda * dx0 wherever the solution is not
yet established, and drops elements where it is; total blow-up (m < 0) doubles
element lengths and the domain, keeping the node count constant.  The run
terminates when the stable step collapses below the floor (blow-up reached),
when the amplitude cap is hit, or at the time limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import DiagnosticsSeries, deviation_norm, front_point, semi_width, ss_representation
from .errors import HeatstructError, ParameterError
from .medium import MediumParams

TAU_FLOOR = 1e-16


class BlowupOverflowError(HeatstructError):
    """Nodal values overflowed double precision; blow-up imminent."""

    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


class _TauFloorReached(Exception):
    pass


def truncate_support(x, u, floor_rel: float = 1e-6):
    """Clip a profile to its leading positive segment for use as initial data.

    Solver output for finite-support regimes carries a tiny transport cascade
    past the physical front; evolution initial data must vanish identically
    beyond the support, so everything from the first drop below
    ``floor_rel * max(u)`` on is zeroed.  Returns (u_clipped, support).
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float).copy()
    peak = float(np.max(u))
    if peak <= 0:
        return u, 0.0
    below = u < floor_rel * peak
    below[0] = False
    idx = int(np.argmax(below)) if np.any(below) else u.size - 1
    u[idx:] = 0.0
    return u, float(x[idx])


def kirchhoff(u, sigma: float):
    """Kirchhoff transform G(u) = u^(sigma+1) / (sigma+1)."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ParameterError("the Kirchhoff transform is defined for u >= 0")
    out = u ** (sigma + 1.0) / (sigma + 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class Matrices:
    lumped: np.ndarray       # lumped mass diagonal
    k_lower: np.ndarray      # subdiagonal of K (length n-1)
    k_diag: np.ndarray       # diagonal of K
    k_upper: np.ndarray      # superdiagonal of K (length n-1)
    row_abs_sum: np.ndarray  # sum_j |K_ij|, for the stability bound

    def apply_stiffness(self, g: np.ndarray) -> np.ndarray:
        out = self.k_diag * g
        out[1:] += self.k_lower * g[:-1]
        out[:-1] += self.k_upper * g[1:]
        return out


_GAUSS3 = np.polynomial.legendre.leggauss(3)


def assemble(params: MediumParams, x) -> Matrices:
    """Lumped mass diagonal and stiffness tridiagonal for nodes x (weight x^(N-1))."""
    x = np.asarray(x, dtype=float)
    h = np.diff(x)
    if np.any(h <= 0):
        raise ParameterError("nodes must be strictly increasing")
    pts, wts = _GAUSS3
    # quadrature points per element
    xg = x[:-1, None] + np.outer(h, (pts + 1.0) / 2.0)
    wg = wts[None, :] * (h[:, None] / 2.0) * xg ** (params.dim - 1)
    phi_a = (x[1:, None] - xg) / h[:, None]
    phi_b = (xg - x[:-1, None]) / h[:, None]

    n = x.size
    lumped = np.zeros(n)
    np.add.at(lumped, np.arange(n - 1), np.sum(wg * phi_a, axis=1))
    np.add.at(lumped, np.arange(1, n), np.sum(wg * phi_b, axis=1))

    w_over_h2 = np.sum(wg, axis=1) / h**2
    k_diag = np.zeros(n)
    np.add.at(k_diag, np.arange(n - 1), w_over_h2)
    np.add.at(k_diag, np.arange(1, n), w_over_h2)
    k_off = -w_over_h2
    row_abs = k_diag.copy()
    row_abs[1:] += np.abs(k_off)
    row_abs[:-1] += np.abs(k_off)
    return Matrices(lumped, k_off, k_diag, k_off, row_abs)


@dataclass(frozen=True)
class EvolveOptions:
    amplitude_cap: float = 1e6
    max_time: float = 1e3
    lam: float = 2.0                  # mesh-law band parameter
    delta_u: float = 1e-7             # establishment accuracy
    established_checks: int = 3
    safety: float = 0.5               # fraction of the explicit stability bound
    growth_limit: float = 1.1         # max amplitude factor per accepted step
    tau_growth: float = 1.2           # step enlargement after acceptance
    tau0: float | None = None
    source: bool = True
    min_active_elements: int = 8
    snapshot_umax: tuple = ()
    fit_window: tuple = (10.0, 1e4)
    record_every: int = 1


@dataclass
class EvolutionState:
    """Mutable state of one run; nodes beyond ``n_active`` are frozen."""

    t: float
    x: np.ndarray
    u: np.ndarray
    n_active: int
    tau: float
    dx0: float
    u0_max: float
    established_count: np.ndarray
    doublings: int = 0
    refinements: int = 0
    drops: int = 0

    @property
    def gamma_ratio(self) -> float:
        return float(np.max(self.u)) / self.u0_max

    @property
    def domain_edge(self) -> float:
        return float(self.x[-1])

    @property
    def established_mask(self) -> np.ndarray:
        """Nodes settled within delta_u over the default number of checks."""
        return self.established_count >= 3


def rhs(params: MediumParams, u: np.ndarray, matrices: Matrices, source: bool = True) -> np.ndarray:
    """Nodal rate M^(-1)(-K G(U)) + q(U); the boundary node is held fixed."""
    with np.errstate(over="ignore", invalid="ignore"):
        g = np.maximum(u, 0.0) ** (params.sigma + 1.0) / (params.sigma + 1.0)
        rate = -matrices.apply_stiffness(g) / matrices.lumped
        if source:
            rate += np.maximum(u, 0.0) ** params.beta
    if not np.all(np.isfinite(rate)):
        raise BlowupOverflowError("nodal rates overflowed; amplitude beyond double range")
    rate[-1] = 0.0
    return rate


def stability_tau_bound(params: MediumParams, u: np.ndarray, matrices: Matrices, options: EvolveOptions) -> float:
    """Maximum-principle step bound from the current diffusion coefficient.

    Gershgorin estimate of the diffusion Jacobian M^(-1) K diag(u^sigma) with
    the local neighborhood maximum of u^sigma, plus a cap that keeps the
    source growth per step at ten percent.
    """
    upos = np.maximum(u, 0.0)
    unbr = upos.copy()
    unbr[:-1] = np.maximum(unbr[:-1], upos[1:])
    unbr[1:] = np.maximum(unbr[1:], upos[:-1])
    lam_diff = float(np.max(matrices.row_abs_sum * unbr**params.sigma / matrices.lumped))
    bound = np.inf if lam_diff == 0.0 else 2.0 / lam_diff
    umax = float(np.max(upos))
    if options.source and umax > 0:
        bound = min(bound, (options.growth_limit - 1.0) / umax ** (params.beta - 1.0))
    return options.safety * bound


def step(params: MediumParams, state: EvolutionState, matrices: Matrices, options: EvolveOptions) -> None:
    """Advance one accepted explicit midpoint step in place.

    Halves the step while a stage produces a negative nodal value or the
    amplitude grows beyond the per-step limit; raises the internal tau-floor
    signal when no acceptable step remains (blow-up reached).
    """
    na = state.n_active
    u = state.u[: na + 1]
    bound = stability_tau_bound(params, u, matrices, options)
    tau = min(state.tau, bound)
    umax = float(np.max(u))
    while True:
        if tau < TAU_FLOOR:
            raise _TauFloorReached
        u_mid = u + (0.5 * tau) * rhs(params, u, matrices, options.source)
        u_new = u + tau * rhs(params, u_mid, matrices, options.source)
        if np.min(u_new) >= 0.0 and (
            umax == 0.0 or float(np.max(u_new)) <= options.growth_limit * umax
        ):
            break
        tau *= 0.5
    state.u[: na + 1] = u_new
    state.t += tau
    state.tau = min(tau * options.tau_growth, bound)


def _mesh_law_violations(params: MediumParams, state: EvolutionState, options: EvolveOptions) -> int:
    """Count active elements breaking the self-similar mesh-law band."""
    m = params.m
    if m == 0.0:
        return 0
    gm = state.gamma_ratio**m
    dx = np.diff(state.x[: state.n_active + 1])
    if m > 0.0:
        est = state.established_count[: state.n_active + 1] >= options.established_checks
        free = ~(est[:-1] & est[1:])
        return int(np.count_nonzero(dx[free] * gm > options.lam * state.dx0 * (1 + 1e-12)))
    return int(np.count_nonzero(dx * gm < state.dx0 / options.lam * (1 - 1e-12)))


def adapt_mesh(params: MediumParams, state: EvolutionState, options: EvolveOptions) -> bool:
    """Apply the regime's mesh adaptation if the law is violated; True if changed.

    Single-point blow-up (m > 0): split every non-established active element
    whose rescaled length exceeds the band, interpolating the solution at the
    new nodes, and drop the established suffix of the active region.  Total
    blow-up (m < 0): double the element lengths and the domain, keeping the
    node count constant.
    """
    m = params.m
    if m == 0.0:
        return False
    changed = False
    while _mesh_law_violations(params, state, options) > 0:
        if m > 0.0:
            _refine_ls(params, state, options)
        else:
            _stretch_hs(state)
        changed = True
    return changed


def _refine_ls(params: MediumParams, state: EvolutionState, options: EvolveOptions):
    na = state.n_active
    gm = state.gamma_ratio**params.m
    est = state.established_count >= options.established_checks
    x_act, u_act = state.x[: na + 1], state.u[: na + 1]
    dx = np.diff(x_act)
    elem_est = est[:na] & est[1 : na + 1]

    # drop the established tail of the active region (elements are neglected)
    cut = na
    while cut > options.min_active_elements and elem_est[cut - 1]:
        cut -= 1
    split = (~elem_est[:cut]) & (dx[:cut] * gm > options.lam * state.dx0 * (1 + 1e-12))

    new_x = [x_act[0]]
    new_u = [u_act[0]]
    new_cnt = [state.established_count[0]]
    for e in range(cut):
        if split[e]:
            new_x.append(0.5 * (x_act[e] + x_act[e + 1]))
            new_u.append(0.5 * (u_act[e] + u_act[e + 1]))
            new_cnt.append(0)
        new_x.append(x_act[e + 1])
        new_u.append(u_act[e + 1])
        new_cnt.append(state.established_count[e + 1])

    state.x = np.concatenate([np.asarray(new_x), state.x[cut + 1 :]])
    state.u = np.concatenate([np.asarray(new_u), state.u[cut + 1 :]])
    state.established_count = np.concatenate(
        [np.asarray(new_cnt, dtype=int), state.established_count[cut + 1 :]]
    )
    state.n_active = len(new_x) - 1
    state.refinements += 1
    if cut < na:
        state.drops += 1


def _stretch_hs(state: EvolutionState):
    old_x, old_u = state.x.copy(), state.u.copy()
    state.x = 2.0 * old_x
    state.u = np.interp(state.x, old_x, old_u, right=0.0)
    state.u[-1] = 0.0
    state.established_count[:] = 0
    state.doublings += 1


@dataclass(frozen=True)
class BlowupEstimate:
    """Blow-up time estimates and run bookkeeping."""

    t_stop: float
    fit_t0: float
    exponent_fit: float
    stop_reason: str
    mesh_law_violations: int = 0
    min_u_seen: float = 0.0
    doublings: int = 0
    refinements: int = 0
    drops: int = 0
    fit_points: int = 0


def _fit_blowup_time(params: MediumParams, t, umax, window) -> tuple[float, float, int]:
    t = np.asarray(t, dtype=float)
    umax = np.asarray(umax, dtype=float)
    lo, hi = window
    mask = (umax >= lo) & (umax <= hi)
    if np.count_nonzero(mask) < 10:
        return np.nan, np.nan, int(np.count_nonzero(mask))
    ts, us = t[mask], umax[mask]
    y = us ** -(params.beta - 1.0)
    slope, intercept = np.polyfit(ts, y, 1)
    if slope >= 0:
        return np.nan, np.nan, ts.size
    fit_t0 = -intercept / slope
    good = fit_t0 > ts
    expo = np.polyfit(np.log(fit_t0 - ts[good]), np.log(us[good]), 1)[0]
    return float(fit_t0), float(expo), ts.size


def run_to_blowup(
    params: MediumParams,
    u0,
    options: EvolveOptions = EvolveOptions(),
    reference=None,
) -> tuple[DiagnosticsSeries, BlowupEstimate]:
    """Evolve finite-support initial data (x, u) until blow-up or a cap.

    Records per-step diagnostics (amplitude, semi-width, front, domain, step,
    mesh size, amplitude ratio, and the deviation norm when a reference
    profile is supplied) and returns both blow-up time estimates: the time at
    which the stable step collapsed, and the intercept of the least-squares
    fit of u_max^(1-beta) against time.
    """
    x0, u0_vals = u0
    x = np.asarray(x0, dtype=float).copy()
    u = np.asarray(u0_vals, dtype=float).copy()
    if x.shape != u.shape or x.ndim != 1:
        raise ParameterError("u0 must be a pair of equally sized 1D arrays")
    if np.any(u < 0):
        raise ParameterError("initial data must be nonnegative")
    if u[-1] != 0.0:
        raise ParameterError("initial data must vanish at the outer boundary")
    if np.any(np.diff(x) <= 0) or x[0] != 0.0:
        raise ParameterError("initial mesh must be strictly increasing from 0")

    u0_max = float(np.max(u))
    dx0 = float(np.max(np.diff(x)))
    state = EvolutionState(
        t=0.0,
        x=x,
        u=u,
        n_active=x.size - 1,
        tau=0.0,
        dx0=dx0,
        u0_max=max(u0_max, 1e-300),
        established_count=np.zeros(x.size, dtype=int),
    )
    matrices = assemble(params, state.x)
    bound = stability_tau_bound(params, u, matrices, options)
    state.tau = options.tau0 if options.tau0 is not None else min(0.5 * bound, 1e-4)

    ref = None
    if reference is not None:
        ref = reference if isinstance(reference, tuple) else (reference.mesh.nodes, reference.theta)

    series = DiagnosticsSeries(reference=ref)
    est_kw = dict(mesh_law_violations=0, min_u_seen=float(np.min(u)))
    snap_pending = sorted(options.snapshot_umax)

    def record():
        xs, _ = semi_width(state.x, state.u)
        xf, _ = front_point(state.x, state.u)
        dev = np.nan
        if ref is not None and np.max(state.u) > 0:
            _, theta = ss_representation(params, state.x, state.u, ref[0], ref[1])
            dev = deviation_norm(ref[1], theta)
        series.append(
            state.t, float(np.max(state.u)), xs, xf, state.domain_edge,
            state.tau, state.x.size, state.gamma_ratio, dev,
        )

    stop_reason = "max_time"
    t_guard = max(options.max_time, 0.0)
    steps_done = 0
    record()
    try:
        while state.t < t_guard:
            u_before = state.u[: state.n_active + 1].copy()
            try:
                step(params, state, matrices, options)
            except _TauFloorReached:
                stop_reason = "tau_floor"
                break
            steps_done += 1
            est_kw["min_u_seen"] = min(est_kw["min_u_seen"], float(np.min(state.u)))

            if params.m > 0.0:
                ua = state.u[: state.n_active + 1]
                settled = np.abs(ua - u_before) < options.delta_u * np.maximum(1.0, np.abs(ua))
                cnt = state.established_count[: state.n_active + 1]
                state.established_count[: state.n_active + 1] = np.where(settled, cnt + 1, 0)

            if adapt_mesh(params, state, options):
                matrices = assemble(params, state.x[: state.n_active + 1])
            est_kw["mesh_law_violations"] += _mesh_law_violations(params, state, options)

            if steps_done % options.record_every == 0:
                record()

            umax = float(np.max(state.u))
            while snap_pending and umax >= snap_pending[0]:
                series.snapshots.append((snap_pending.pop(0), state.x.copy(), state.u.copy()))
            if umax >= options.amplitude_cap:
                stop_reason = "amplitude_cap"
                break
    except BlowupOverflowError as err:
        err.series = series
        raise

    if len(series) == 0 or series.t[-1] < state.t:
        record()
    fit_t0, expo, npts = _fit_blowup_time(params, series.t, series.umax, options.fit_window)
    estimate = BlowupEstimate(
        t_stop=state.t,
        fit_t0=fit_t0,
        exponent_fit=expo,
        stop_reason=stop_reason,
        doublings=state.doublings,
        refinements=state.refinements,
        drops=state.drops,
        fit_points=npts,
        **est_kw,
    )
    return series, estimate
