"""Self-similar boundary-value solver: Galerkin FEM driven by continuous Newton.

The self-similar function theta_s(xi) >= 0 satisfies the degenerate ODE

    L(theta) = -xi^(1-N) (xi^(N-1) theta^sigma theta')'
               + m_hat xi theta' + c_hat theta - theta^beta = 0,

    m_hat = (beta-sigma-1) / (2 (beta-1) T0),   c_hat = 1 / ((beta-1) T0),

with theta'(0) = 0 and a far-field condition translated to the truncation
point: a homogeneous Dirichlet value for finite-support regimes (S, HS) or the
tail-slope Robin condition for the LS power tail.  The weak form is weighted
by xi^(N-1), which makes the symmetry condition at the origin natural.

The nonlinear system is solved by the continuous analog of Newton's method:
Euler steps theta_{n+1} = theta_n + tau_n v_n on the Newton flow
L'(theta) dtheta/dt = -L(theta), with the linearized operator

    L'(theta) v = -xi^(1-N) (xi^(N-1) (theta^sigma v)')'
                  + m_hat xi v' + c_hat v - beta theta^(beta-1) v

(the diffusion term linearizes through theta^sigma theta' = (theta^(sigma+1)/(sigma+1))').
Each step solves a banded nonsymmetric system by LU factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceError, DivergenceError, ParameterError
from .medium import MediumParams, RegimeKind, classify
from .linear_init import count_level_crossings

# nodal values are clamped at this floor inside theta^sigma evaluations so that
# the degenerate coefficient never produces 0^negative in derivative terms
DEGENERACY_FLOOR = 1e-14

_GAUSS = {n: np.polynomial.legendre.leggauss(n) for n in (3, 5)}


@dataclass(frozen=True)
class Mesh1D:
    """Radial mesh on [0, l] with linear or quadratic Lagrange elements."""

    nodes: np.ndarray
    element_kind: str = "linear"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ParameterError("mesh needs a 1D array of at least 2 nodes")
        if nodes[0] != 0.0:
            raise ParameterError("mesh must start at xi = 0")
        if np.any(np.diff(nodes) <= 0):
            raise ParameterError("mesh nodes must be strictly increasing")
        if self.element_kind not in ("linear", "quadratic"):
            raise ParameterError(f"unknown element kind {self.element_kind!r}")
        if self.element_kind == "quadratic" and (nodes.size - 1) % 2 != 0:
            raise ParameterError("quadratic elements need an even interval count")
        if self.n_elements < 8:
            raise ParameterError("mesh must have at least 8 elements")

    @classmethod
    def uniform(cls, length: float, n_elements: int, element_kind: str = "linear") -> "Mesh1D":
        npts = n_elements + 1 if element_kind == "linear" else 2 * n_elements + 1
        return cls(np.linspace(0.0, length, npts), element_kind)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        step = 1 if self.element_kind == "linear" else 2
        return (self.nodes.size - 1) // step

    @property
    def length(self) -> float:
        return float(self.nodes[-1])

    @property
    def h_max(self) -> float:
        step = 1 if self.element_kind == "linear" else 2
        return float(np.max(self.nodes[step::step] - self.nodes[:-step:step]))

    def connectivity(self) -> np.ndarray:
        if self.element_kind == "linear":
            e = np.arange(self.n_elements)
            return np.stack([e, e + 1], axis=1)
        e = 2 * np.arange(self.n_elements)
        return np.stack([e, e + 1, e + 2], axis=1)

    @property
    def bandwidth(self) -> int:
        return 1 if self.element_kind == "linear" else 2


def _shape_tables(kind: str):
    if kind == "linear":
        pts, wts = _GAUSS[3]
        shp = np.stack([(1.0 - pts) / 2.0, (1.0 + pts) / 2.0])
        dshp = np.stack([np.full_like(pts, -0.5), np.full_like(pts, 0.5)])
    else:
        pts, wts = _GAUSS[5]
        shp = np.stack([0.5 * pts * (pts - 1.0), 1.0 - pts * pts, 0.5 * pts * (pts + 1.0)])
        dshp = np.stack([pts - 0.5, -2.0 * pts, pts + 0.5])
    return pts, wts, shp, dshp


class _Assembler:
    """Precomputed quadrature data for one mesh and parameter set."""

    def __init__(self, params: MediumParams, mesh: Mesh1D):
        self.params = params
        self.mesh = mesh
        self.conn = mesh.connectivity()
        pts, wts, shp, dshp = _shape_tables(mesh.element_kind)
        x = mesh.nodes[self.conn]  # (nel, nloc)
        # isoparametric map is affine: interior nodes of quadratic elements
        # sit at the element midpoint by construction of Mesh1D.uniform; a
        # general mesh is mapped through its end nodes.
        xa, xb = x[:, 0], x[:, -1]
        self.h = xb - xa  # (nel,)
        self.xg = xa[:, None] + np.outer(self.h, (pts + 1.0) / 2.0)  # (nel, ng)
        self.jac = self.h[:, None] / 2.0
        self.wgt = wts[None, :] * self.jac * self.xg ** (params.dim - 1)
        self.shp = shp  # (nloc, ng)
        self.dshp = dshp  # (nloc, ng) in reference coords
        self.dshp_x = dshp[None, :, :] / self.jac[:, None, :]  # (nel, nloc, ng)
        self.m_hat = params.m / ((params.beta - 1.0) * params.t0)
        self.c_hat = 1.0 / ((params.beta - 1.0) * params.t0)
        # lumped mass (row sums of the weighted mass matrix)
        mloc = np.einsum("eg,ig->ei", self.wgt, shp)
        self.lumped_mass = np.zeros(mesh.n_nodes)
        np.add.at(self.lumped_mass, self.conn, mloc)
        self.total_weight = mesh.length ** params.dim / params.dim

    def _fields(self, theta):
        th_loc = theta[self.conn]  # (nel, nloc)
        th_g = np.einsum("ei,ig->eg", th_loc, self.shp)
        dth_g = np.einsum("ei,eig->eg", th_loc, self.dshp_x)
        return th_g, dth_g

    def residual_vector(self, theta, bc: str) -> np.ndarray:
        p = self.params
        th_g, dth_g = self._fields(theta)
        th_pos = np.maximum(th_g, 0.0)
        th_c = np.maximum(th_g, DEGENERACY_FLOOR)
        flux = th_c**p.sigma * dth_g
        low = self.m_hat * self.xg * dth_g + self.c_hat * th_g - th_pos**p.beta
        # F_i = sum_g wgt * (flux * dphi_i + low * phi_i)
        contrib = np.einsum("eg,eig->ei", self.wgt * flux, self.dshp_x) + np.einsum(
            "eg,ig->ei", self.wgt * low, self.shp
        )
        f = np.zeros(self.mesh.n_nodes)
        np.add.at(f, self.conn, contrib)
        self._apply_bc_residual(f, theta, bc)
        return f

    def jacobian_banded(self, theta, bc: str) -> np.ndarray:
        p = self.params
        kd = self.mesh.bandwidth
        th_g, dth_g = self._fields(theta)
        th_pos = np.maximum(th_g, 0.0)
        th_c = np.maximum(th_g, DEGENERACY_FLOOR)
        coef_sig = th_c**p.sigma
        coef_dsig = p.sigma * th_c ** (p.sigma - 1.0) * dth_g
        coef_react = self.c_hat - p.beta * th_pos ** (p.beta - 1.0)

        # local blocks: (theta^sigma phi_j' + sigma theta^(sigma-1) theta' phi_j) phi_i'
        #             + (m_hat xi phi_j' + coef_react phi_j) phi_i
        a_diff = np.einsum("eg,ejg,eig->eij", self.wgt * coef_sig, self.dshp_x, self.dshp_x)
        a_diff += np.einsum("eg,jg,eig->eij", self.wgt * coef_dsig, self.shp, self.dshp_x)
        a_conv = np.einsum("eg,ejg,ig->eij", self.wgt * self.m_hat * self.xg, self.dshp_x, self.shp)
        a_reac = np.einsum("eg,jg,ig->eij", self.wgt * coef_react, self.shp, self.shp)
        local = a_diff + a_conv + a_reac

        n = self.mesh.n_nodes
        ab = np.zeros((2 * kd + 1, n))
        rows = self.conn[:, :, None]  # global i
        cols = self.conn[:, None, :]  # global j
        band = kd + rows - cols
        cols_full = np.broadcast_to(cols, band.shape)
        np.add.at(ab, (band.ravel(), cols_full.ravel()), local.ravel())
        self._apply_bc_jacobian(ab, theta, bc)
        return ab

    def _robin_coef(self):
        p = self.params
        length = self.mesh.length
        tail = 2.0 / (p.beta - p.sigma - 1.0)
        return tail * length ** (p.dim - 2)

    def _apply_bc_residual(self, f, theta, bc):
        if bc == "dirichlet":
            f[-1] = 0.0
        elif bc == "robin":
            thn = max(theta[-1], 0.0)
            f[-1] += self._robin_coef() * thn ** (self.params.sigma + 1.0)
        elif bc != "natural":
            raise ParameterError(f"unknown boundary condition {bc!r}")

    def _apply_bc_jacobian(self, ab, theta, bc):
        kd = self.mesh.bandwidth
        n = self.mesh.n_nodes
        if bc == "dirichlet":
            # replace the last row by the identity
            for off in range(-kd, kd + 1):
                j = n - 1 - off
                if 0 <= j < n:
                    ab[kd + off, j] = 0.0
            ab[kd, n - 1] = 1.0
        elif bc == "robin":
            thn = max(theta[-1], DEGENERACY_FLOOR)
            ab[kd, n - 1] += (
                self._robin_coef() * (self.params.sigma + 1.0) * thn**self.params.sigma
            )

    def norm(self, f, bc) -> float:
        w = f * f / self.lumped_mass
        if bc == "dirichlet":
            w = w[:-1]
        return float(np.sqrt(np.sum(w) / self.total_weight))


def _bc_for(params: MediumParams, bc: str | None) -> str:
    if bc is not None and bc != "auto":
        return bc
    kind = classify(params).kind
    return "robin" if kind in (RegimeKind.LS, RegimeKind.BEYOND_FUJITA) else "dirichlet"


def residual(params: MediumParams, mesh: Mesh1D, theta, bc: str = "natural"):
    """Weighted weak-form residual of the self-similar operator; returns (vector, norm)."""
    theta = np.asarray(theta, dtype=float)
    asm = _Assembler(params, mesh)
    f = asm.residual_vector(theta, bc)
    return f, asm.norm(f, bc)


def linearized_apply(params: MediumParams, mesh: Mesh1D, theta, bc: str = "natural"):
    """Banded matrix of the linearized operator in the FEM basis.

    Returned in LAPACK band storage with ``mesh.bandwidth`` sub/superdiagonals
    (3 total diagonals for linear elements, 5 for quadratic).
    """
    theta = np.asarray(theta, dtype=float)
    return _Assembler(params, mesh).jacobian_banded(theta, bc)


@dataclass(frozen=True)
class NewtonStep:
    tau_n: float
    residual_before: float
    residual_after: float
    direction: np.ndarray | None = None


@dataclass(frozen=True)
class CanmOptions:
    tol: float = 1e-7
    max_iterations: int = 60
    tau0: float = 0.1
    max_halvings: int = 5
    max_growths: int = 5
    bc: str = "auto"
    keep_directions: bool = True


@dataclass(frozen=True)
class SelfSimilarSolution:
    """Converged profile theta_{s,k} with its Newton history."""

    params: MediumParams
    k: int
    mesh: Mesh1D
    theta: np.ndarray
    residual_norm: float
    iterations: int
    crossings: int = 0
    bc: str = "dirichlet"
    steps: tuple = ()

    def __post_init__(self):
        if self.residual_norm >= 1e-7:
            raise ParameterError("converged solutions must have residual_norm < 1e-7")
        if np.any(self.theta < 0):
            raise ParameterError("converged solutions must be nonnegative")
        if np.max(self.theta) > 10.0 * self.params.theta_h:
            raise ParameterError("solution exceeds the 10 * theta_H sanity envelope")

    @property
    def residual_history(self) -> list:
        hist = [self.steps[0].residual_before] if self.steps else []
        hist += [s.residual_after for s in self.steps]
        return hist


def canm_solve(
    params: MediumParams,
    k: int,
    guess,
    mesh: Mesh1D,
    options: CanmOptions = CanmOptions(),
) -> SelfSimilarSolution:
    """Drive the damped Newton flow from ``guess`` to a converged profile.

    ``guess`` may be a LinearApproximation or a nodal array on ``mesh``.  The
    step length starts at tau_0 and follows tau_n = min(1, tau_{n-1} *
    |L(theta_{n-1})| / |L(theta_n)|); a step that increases the residual is
    halved and retried.  Raises DivergenceError when the residual grows
    persistently, the iterate leaves the sanity envelope, or the iteration
    budget is exhausted.
    """
    theta = np.asarray(getattr(guess, "values", guess), dtype=float).copy()
    if theta.shape != (mesh.n_nodes,):
        raise ParameterError(
            f"guess has {theta.size} values for a mesh with {mesh.n_nodes} nodes"
        )
    theta = np.clip(theta, 0.0, None)
    bc = _bc_for(params, options.bc)
    if bc == "dirichlet":
        theta[-1] = 0.0

    asm = _Assembler(params, mesh)
    kd = mesh.bandwidth
    f = asm.residual_vector(theta, bc)
    norm = asm.norm(f, bc)
    steps: list[NewtonStep] = []
    tau = options.tau0
    growths = 0
    envelope = 10.0 * params.theta_h

    for iteration in range(options.max_iterations):
        if norm < options.tol:
            final = np.clip(theta, 0.0, None)
            return SelfSimilarSolution(
                params=params,
                k=k,
                mesh=mesh,
                theta=final,
                residual_norm=norm,
                iterations=iteration,
                crossings=count_level_crossings(final, params.theta_h),
                bc=bc,
                steps=tuple(steps),
            )
        ab = asm.jacobian_banded(theta, bc)
        v = solve_banded((kd, kd), ab, -f)
        if not np.all(np.isfinite(v)):
            raise DivergenceError("Newton direction is not finite (singular linearization)")

        if steps:
            prev = steps[-1]
            tau = min(1.0, tau * prev.residual_before / max(prev.residual_after, 1e-300))
        tau = min(max(tau, 1e-6), 1.0)

        trial_tau = tau
        best = None
        accepted = False
        for _ in range(options.max_halvings + 1):
            trial = theta + trial_tau * v
            f_trial = asm.residual_vector(trial, bc)
            norm_trial = asm.norm(f_trial, bc)
            if best is None or norm_trial < best[1]:
                best = (trial, norm_trial, f_trial, trial_tau)
            if norm_trial < norm:
                accepted = True
                break
            trial_tau *= 0.5
        trial, norm_trial, f_trial, used_tau = best
        if accepted:
            growths = 0
        else:
            growths += 1
            if growths >= options.max_growths:
                raise DivergenceError(
                    f"residual grew for {growths} consecutive steps (norm = {norm_trial:.3e})"
                )
        steps.append(
            NewtonStep(
                tau_n=used_tau,
                residual_before=norm,
                residual_after=norm_trial,
                direction=v if options.keep_directions else None,
            )
        )
        theta, f, norm, tau = trial, f_trial, norm_trial, used_tau
        if np.max(theta) > envelope:
            raise DivergenceError(
                f"iterate exceeded the sanity envelope 10 * theta_H = {envelope:.3g}"
            )
        if np.min(theta) < -1.0:
            raise DivergenceError("iterate developed large negative values")

    raise DivergenceError(
        f"no convergence within {options.max_iterations} iterations (norm = {norm:.3e})"
    )


def find_structure(
    params: MediumParams,
    k: int,
    mesh: Mesh1D,
    options: CanmOptions = CanmOptions(),
    alpha_grid=None,
) -> SelfSimilarSolution:
    """Solve for the k-th structure, retrying guess amplitudes until the
    converged profile has the requested crossing count."""
    from .linear_init import ALPHA_GRID, build_guess

    regime = classify(params).kind
    if regime is RegimeKind.S:
        guess = build_guess(params, k, mesh)
        return canm_solve(params, k, guess, mesh, options)
    grid = alpha_grid if alpha_grid is not None else ALPHA_GRID
    last_error = None
    for mag in grid:
        try:
            guess = build_guess(params, k, mesh, alpha=mag)
            sol = canm_solve(params, k, guess, mesh, options)
        except (ConvergenceError, DivergenceError, ParameterError) as err:
            last_error = err
            continue
        if sol.crossings == k:
            return sol
        last_error = DivergenceError(
            f"converged to a profile with {sol.crossings} crossings, expected {k}"
        )
    raise DivergenceError(f"could not isolate structure k = {k}: {last_error}")


@dataclass(frozen=True)
class ConvergenceStudy:
    h_values: np.ndarray
    errors: np.ndarray
    orders: np.ndarray
    fitted_order: float
    inconclusive: bool


def convergence_study(
    params: MediumParams,
    k: int,
    meshes,
    guess_builder=None,
    reference=None,
    options: CanmOptions = CanmOptions(),
    region=None,
) -> ConvergenceStudy:
    """Observed convergence order over a sequence of nested meshes.

    ``reference`` is a callable giving the exact profile (the S-regime
    explicit solution, typically); when omitted, the finest-mesh solution is
    used and only the coarser meshes enter the fit.  ``region`` optionally
    restricts the nodal error to a smooth subregion (a mask callable on the
    node coordinates); the optimal orders hold away from the degenerate front,
    so superconvergence measurements exclude its neighborhood.
    """
    if len(meshes) < 3:
        raise ParameterError("a convergence study needs at least 3 meshes")
    from .linear_init import build_guess

    if guess_builder is None:
        guess_builder = lambda mesh: build_guess(params, k, mesh)

    solutions = [
        canm_solve(params, k, guess_builder(mesh), mesh, options) for mesh in meshes
    ]
    if reference is None:
        fine = solutions[-1]
        ref = lambda x: np.interp(x, fine.mesh.nodes, fine.theta)
        pairs = solutions[:-1]
    else:
        ref = reference
        pairs = solutions

    def node_error(sol):
        err = np.abs(sol.theta - ref(sol.mesh.nodes))
        if region is not None:
            err = err[region(sol.mesh.nodes)]
        return float(np.max(err))

    h_values = np.array([s.mesh.length / s.mesh.n_elements for s in pairs])
    errors = np.array([node_error(s) for s in pairs])
    if np.all(errors < 1e-13):
        nan = np.full(errors.size - 1, np.nan)
        return ConvergenceStudy(h_values, errors, nan, np.nan, inconclusive=False)
    inconclusive = bool(np.any(np.diff(errors) >= 0))
    with np.errstate(divide="ignore"):
        orders = np.log(errors[:-1] / errors[1:]) / np.log(h_values[:-1] / h_values[1:])
    slope = np.polyfit(np.log(h_values), np.log(errors), 1)[0]
    return ConvergenceStudy(
        h_values=h_values,
        errors=errors,
        orders=orders,
        fitted_order=float(slope),
        inconclusive=inconclusive,
    )
