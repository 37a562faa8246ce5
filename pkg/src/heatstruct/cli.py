"""Experiment runner: configuration, scenario orchestration, file outputs.

Scenarios bind the library into reproducible desk experiments:

- ``classify``     regime taxonomy and solution counts for one parameter set
- ``selfsim``      converged self-similar profiles theta_{s,k}
- ``evolve``       a blow-up run from chosen initial data with diagnostics
- ``stability``    perturbed runs around theta_{s,1} with verdicts
- ``convergence``  observed FEM orders on nested meshes

Configs are line-oriented ``key = value`` text with ``#`` comments.  Outputs
are CSV files (profiles: ``xi,theta``; snapshots: ``x,u``; series:
``t,umax,xs,xf,X,tau,nnodes,gamma,dev``) plus an INI-style ``summary.txt``.
Exit codes: 0 success, 2 solver divergence, 3 configuration error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import exact
from .diagnostics import (
    DiagnosticsSeries,
    deviation_norm,
    ss_representation,
    stability_verdict,
    StabilityThresholds,
)
from .errors import HeatstructError, ParameterError
from .evolve import EvolveOptions, run_to_blowup, truncate_support
from .linear_init import build_guess
from .medium import MediumParams, RegimeKind, classify, solution_count
from .selfsim import CanmOptions, Mesh1D, SelfSimilarSolution, canm_solve, convergence_study, find_structure

PROFILE_HEADER = "xi,theta"
SNAPSHOT_HEADER = "x,u"
SERIES_HEADER = "t,umax,xs,xf,X,tau,nnodes,gamma,dev"

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_CONFIG = 3


class ConfigError(HeatstructError):
    pass


SCENARIOS = ("classify", "selfsim", "evolve", "stability", "convergence")


@dataclass
class ExperimentConfig:
    scenario: str
    sigma: float
    beta: float
    dim: int = 1
    t0: float | None = None
    k: tuple = (1,)
    h: float | None = None
    l: float | None = None
    element_kind: str = "linear"
    guess_amp: float | None = None
    guess_stretch: float | None = None
    u0: str = "selfsim"
    u0_factor: float = 1.0
    evolve_h: float | None = None
    domain_factor: float = 3.0
    amplitude_cap: float = 1e6
    max_time: float = 1e3
    lam: float = 2.0
    delta_u: float = 1e-7
    safety: float = 0.5
    fit_lo: float = 10.0
    fit_hi: float = 1e4
    snapshot_umax: tuple = ()
    perturb_factors: tuple = (0.8, 1.2)
    perturb_widen: float = 1.1
    gamma_cap: float = 1.35e3
    snapshot_gammas: tuple = (1.5, 5.0, 15.0, 50.0, 150.0, 500.0, 1300.0)
    outdir: str = "out"

    def params(self) -> MediumParams:
        try:
            return MediumParams(self.sigma, self.beta, self.dim, t0=self.t0)
        except ParameterError as err:
            raise ConfigError(str(err)) from err


_TUPLE_KEYS = {"k", "perturb_factors", "snapshot_umax", "snapshot_gammas"}
_INT_KEYS = {"dim"}
_STR_KEYS = {"scenario", "element_kind", "u0", "outdir"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines (# comments) into a validated config."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not hasattr(ExperimentConfig, "__dataclass_fields__") or key not in ExperimentConfig.__dataclass_fields__:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in _STR_KEYS:
            values[key] = val
        elif key in _TUPLE_KEYS:
            try:
                items = tuple(float(v) for v in val.split(",") if v.strip())
            except ValueError as err:
                raise ConfigError(f"line {lineno}: bad list for {key!r}: {val!r}") from err
            values[key] = tuple(int(v) for v in items) if key == "k" else items
        elif key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError as err:
                raise ConfigError(f"line {lineno}: bad integer for {key!r}: {val!r}") from err
        else:
            try:
                values[key] = float(val)
            except ValueError as err:
                raise ConfigError(f"line {lineno}: bad number for {key!r}: {val!r}") from err

    if "scenario" not in values:
        raise ConfigError("missing required key 'scenario'")
    if values["scenario"] not in SCENARIOS:
        raise ConfigError(f"unknown scenario {values['scenario']!r}; choose from {SCENARIOS}")
    for required in ("sigma", "beta"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    cfg = ExperimentConfig(**values)
    cfg.params()  # validates sigma / beta / dim / t0 preconditions
    if cfg.element_kind not in ("linear", "quadratic"):
        raise ConfigError(f"element_kind must be linear or quadratic, got {cfg.element_kind!r}")
    if any(kk < 1 for kk in cfg.k):
        raise ConfigError("structure indices k must be >= 1")
    return cfg


# ----------------------------------------------------------------------------
# output helpers

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_profile_csv(path: Path, xi, theta, header: str = PROFILE_HEADER):
    lines = [header]
    lines += [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(xi, theta)]
    path.write_text("\n".join(lines) + "\n")


def write_series_csv(path: Path, series: DiagnosticsSeries):
    a = series.as_arrays()
    cols = [a["t"], a["umax"], a["xs"], a["xf"], a["X"], a["tau"], a["nnodes"], a["gamma"], a["dev"]]
    lines = [SERIES_HEADER]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def validate_csv(path: Path, header: str):
    """Schema check: declared header, uniform float rows, at least one row."""
    text = path.read_text().strip().splitlines()
    if not text or text[0] != header:
        raise HeatstructError(f"{path}: header mismatch (expected {header!r})")
    ncols = len(header.split(","))
    if len(text) < 2:
        raise HeatstructError(f"{path}: no data rows")
    for line in text[1:]:
        parts = line.split(",")
        if len(parts) != ncols:
            raise HeatstructError(f"{path}: row with {len(parts)} columns, expected {ncols}")
        for p in parts:
            float(p)  # raises ValueError on malformed numbers


class Summary:
    """INI-style run summary accumulated section by section."""

    def __init__(self):
        self.sections: list[tuple[str, list[tuple[str, str]]]] = []

    def section(self, name: str, **entries) -> None:
        self.sections.append((name, [(k, str(v)) for k, v in entries.items()]))

    def write(self, path: Path):
        out = []
        for name, entries in self.sections:
            out.append(f"[{name}]")
            out += [f"{k} = {v}" for k, v in entries]
            out.append("")
        path.write_text("\n".join(out))


# ----------------------------------------------------------------------------
# guesses for the finite-support regimes

_BUMP_TRIALS = (
    (1.2, 1.0),
    (1.45, 0.87),
    (1.3, 1.4),
    (1.3, 1.1),
    (1.5, 1.25),
    (1.9, 1.0),
    (2.4, 1.3),
    (1.94, 1.0),
)


def _solve_structure(cfg: ExperimentConfig, params: MediumParams, k: int, mesh: Mesh1D) -> SelfSimilarSolution:
    kind = classify(params).kind
    options = CanmOptions(tau0=0.2)
    if kind in (RegimeKind.LS, RegimeKind.BEYOND_FUJITA):
        return find_structure(params, k, mesh, options)
    trials = _BUMP_TRIALS
    if cfg.guess_amp is not None and cfg.guess_stretch is not None:
        trials = ((cfg.guess_amp, cfg.guess_stretch),) + trials
    if kind is RegimeKind.S:
        if params.dim == 1 and cfg.guess_amp is None:
            return canm_solve(params, k, build_guess(params, k, mesh), mesh, options)
        # for N > 1 the multi-bump composition is only a guess; scale it
        last = None
        for amp, stretch in trials:
            guess = amp * exact.zk_multibump(params.sigma, k, mesh.nodes / stretch)
            try:
                return canm_solve(params, k, guess, mesh, options)
            except HeatstructError as err:
                last = err
        raise last
    # HS: single monotone structure from a scaled elementary bump
    if k != 1:
        raise ConfigError("the HS regime has a single structure; use k = 1")
    last = None
    for amp, stretch in trials:
        guess = amp * exact.zk_eval(params.sigma, mesh.nodes / stretch)
        try:
            return canm_solve(params, k, guess, mesh, options)
        except HeatstructError as err:
            last = err
    raise last


def _default_mesh(cfg: ExperimentConfig, params: MediumParams, k_max: int) -> Mesh1D:
    kind = classify(params).kind
    ls = exact.fundamental_length(params.sigma)
    if cfg.l is not None:
        length = cfg.l
    elif kind is RegimeKind.S:
        length = max(2.0, 1.5 * k_max) * ls / 2.0
    elif kind is RegimeKind.HS:
        length = 1.1 * ls
    else:
        length = 14.0
    h = cfg.h if cfg.h is not None else (ls / 400 if kind is RegimeKind.S else length / 700)
    n = max(8, int(round(length / h)))
    return Mesh1D.uniform(length, n, cfg.element_kind)


# ----------------------------------------------------------------------------
# scenarios

def _scenario_classify(cfg: ExperimentConfig, outdir: Path, summary: Summary):
    params = cfg.params()
    regime = classify(params)
    entries = dict(
        regime=regime.kind.value,
        theta_h=_fmt(params.theta_h),
        m=_fmt(params.m),
        beta_fujita=_fmt(params.beta_fujita),
    )
    if params.beta_sobolev is not None:
        entries["beta_sobolev"] = _fmt(params.beta_sobolev)
        entries["beyond_sobolev"] = regime.beyond_sobolev
    if params.beta_u is not None:
        entries["beta_u"] = _fmt(params.beta_u)
        entries["beyond_u"] = regime.beyond_u
        entries["beta_p"] = _fmt(params.beta_p)
        entries["beyond_p"] = regime.beyond_p
    if params.beta > params.sigma + 1.0:
        counts = solution_count(params)
        entries["count_lower_bound"] = counts.lower_bound
        entries["count_refined"] = counts.refined
        entries["count_formula_proved"] = counts.formula_proved
    summary.section("classify", **entries)
    return []


def _scenario_selfsim(cfg: ExperimentConfig, outdir: Path, summary: Summary, label: str = ""):
    params = cfg.params()
    mesh = _default_mesh(cfg, params, max(cfg.k))
    written = []
    for k in cfg.k:
        sol = _solve_structure(cfg, params, k, mesh)
        name = f"profile_{label}k{k}.csv" if label else f"profile_k{k}.csv"
        path = outdir / name
        write_profile_csv(path, mesh.nodes, sol.theta)
        written.append((path, PROFILE_HEADER))
        entries = dict(
            k=k,
            iterations=sol.iterations,
            residual_norm=_fmt(sol.residual_norm),
            l=_fmt(mesh.length),
            h=_fmt(mesh.length / mesh.n_elements),
            crossings=sol.crossings,
            bc=sol.bc,
        )
        if classify(params).kind is RegimeKind.HS and params.dim > 1:
            entries["note"] = (
                "HS uniqueness is proved for N = 1 only; which solution the "
                "iteration selects for N > 1 is determined by the guess"
            )
        summary.section(f"solve.{label}k{k}", **entries)
    return written


def _initial_data(cfg: ExperimentConfig, params: MediumParams):
    """Build evolution initial data (x, u) per the config's u0 selector."""
    kind = classify(params).kind
    if cfg.u0 == "zk":
        if kind is not RegimeKind.S or params.dim != 1:
            raise ConfigError("u0 = zk requires the S regime with N = 1")
        support = 0.5 * exact.fundamental_length(params.sigma)
        profile = lambda x: exact.zk_eval(params.sigma, x)
    elif cfg.u0.startswith("multibump"):
        try:
            kb = int(cfg.u0.split(":")[1])
        except (IndexError, ValueError) as err:
            raise ConfigError("u0 = multibump:<k> requires an integer k") from err
        if kind is not RegimeKind.S or params.dim != 1:
            raise ConfigError("multibump data requires the S regime with N = 1")
        support = 0.5 * kb * exact.fundamental_length(params.sigma)
        profile = lambda x: exact.zk_multibump(params.sigma, kb, x)
    elif cfg.u0 == "selfsim":
        mesh = _default_mesh(cfg, params, max(cfg.k))
        sol = _solve_structure(cfg, params, max(cfg.k), mesh)
        u_ref, support = truncate_support(mesh.nodes, sol.theta)
        profile = lambda x: np.interp(x, mesh.nodes, u_ref, right=0.0)
    else:
        raise ConfigError(f"unknown u0 selector {cfg.u0!r}")

    h = cfg.evolve_h if cfg.evolve_h is not None else support / 50.0
    X = cfg.domain_factor * support
    n = max(16, int(round(X / h)))
    x = np.linspace(0.0, X, n + 1)
    u = cfg.u0_factor * np.asarray(profile(x), dtype=float)
    u[-1] = 0.0
    return x, u


def _evolve_options(cfg: ExperimentConfig, **overrides) -> EvolveOptions:
    base = dict(
        amplitude_cap=cfg.amplitude_cap,
        max_time=cfg.max_time,
        lam=cfg.lam,
        delta_u=cfg.delta_u,
        safety=cfg.safety,
        fit_window=(cfg.fit_lo, cfg.fit_hi),
        snapshot_umax=tuple(cfg.snapshot_umax),
    )
    base.update(overrides)
    return EvolveOptions(**base)


def _scenario_evolve(cfg: ExperimentConfig, outdir: Path, summary: Summary):
    params = cfg.params()
    x, u = _initial_data(cfg, params)
    series, estimate = run_to_blowup(params, (x, u), _evolve_options(cfg))
    written = []
    spath = outdir / "series.csv"
    write_series_csv(spath, series)
    written.append((spath, SERIES_HEADER))
    for i, (label, sx, su) in enumerate(series.snapshots):
        path = outdir / f"snapshot_{i:02d}.csv"
        write_profile_csv(path, sx, su, header=SNAPSHOT_HEADER)
        written.append((path, SNAPSHOT_HEADER))
        summary.section(f"snapshot.{i:02d}", umax_threshold=_fmt(label), file=path.name)
    summary.section(
        "evolve",
        stop_reason=estimate.stop_reason,
        t_stop=_fmt(estimate.t_stop),
        fit_t0=_fmt(estimate.fit_t0),
        exponent_fit=_fmt(estimate.exponent_fit),
        fit_points=estimate.fit_points,
        doublings=estimate.doublings,
        refinements=estimate.refinements,
        drops=estimate.drops,
        mesh_law_violations=estimate.mesh_law_violations,
        min_u_seen=_fmt(estimate.min_u_seen),
        steps=len(series),
    )
    return written


def _scenario_stability(cfg: ExperimentConfig, outdir: Path, summary: Summary):
    params = cfg.params()
    mesh = _default_mesh(cfg, params, 1)
    ref = _solve_structure(cfg, params, 1, mesh)
    ref_max = float(np.max(ref.theta))
    u_ref, support = truncate_support(mesh.nodes, ref.theta)

    written = []
    rpath = outdir / "reference.csv"
    write_profile_csv(rpath, mesh.nodes, ref.theta)
    written.append((rpath, PROFILE_HEADER))

    perturbations = [("factor_%.2f" % f, f, 1.0) for f in cfg.perturb_factors]
    perturbations.append(("widen_%.2f" % cfg.perturb_widen, 1.0, cfg.perturb_widen))
    summary.section(
        "stability",
        reference_peak=_fmt(ref_max),
        perturb_factors=",".join(str(f) for f in cfg.perturb_factors),
        perturb_widen=str(cfg.perturb_widen),
        gamma_cap=_fmt(cfg.gamma_cap),
        note="gamma_hold is an artifact threshold, not a physical constant",
    )

    h = cfg.evolve_h if cfg.evolve_h is not None else support / 250.0
    X = cfg.domain_factor * support
    n = max(16, int(round(X / h)))
    x = np.linspace(0.0, X, n + 1)

    for name, factor, widen in perturbations:
        u0 = factor * np.interp(x / widen, mesh.nodes, u_ref, right=0.0)
        u0[-1] = 0.0
        rundir = outdir / name
        rundir.mkdir(parents=True, exist_ok=True)
        snapshots = tuple(g * ref_max for g in cfg.snapshot_gammas)
        options = _evolve_options(
            cfg, amplitude_cap=cfg.gamma_cap * ref_max, snapshot_umax=snapshots
        )
        series, estimate = run_to_blowup(params, (x, u0), options, reference=ref)
        spath = rundir / "series.csv"
        write_series_csv(spath, series)
        written.append((spath, SERIES_HEADER))
        for i, (label, sx, su) in enumerate(series.snapshots):
            gamma, theta = ss_representation(params, sx, su, mesh.nodes, ref.theta)
            path = rundir / f"rep_{i:02d}.csv"
            write_profile_csv(path, mesh.nodes, theta)
            written.append((path, PROFILE_HEADER))
        verdict = stability_verdict(series, ref, StabilityThresholds(gamma_hold=cfg.gamma_cap / 1.35))
        summary.section(
            f"stability.{name}",
            verdict=verdict.kind.value,
            hold_until_gamma=_fmt(verdict.hold_until_gamma),
            final_deviation=_fmt(verdict.final_deviation),
            fit_t0=_fmt(estimate.fit_t0),
            mesh_law_violations=estimate.mesh_law_violations,
            min_u_seen=_fmt(estimate.min_u_seen),
            snapshots=len(series.snapshots),
        )
    return written


def _scenario_convergence(cfg: ExperimentConfig, outdir: Path, summary: Summary):
    params = cfg.params()
    kind = classify(params).kind
    k = cfg.k[0]
    base = _default_mesh(cfg, params, k)
    ns = [max(8, base.n_elements // 4), max(16, base.n_elements // 2), base.n_elements]
    meshes = [Mesh1D.uniform(base.length, n, cfg.element_kind) for n in ns]
    reference = None
    region = None
    if kind is RegimeKind.S and params.dim == 1:
        reference = lambda x: exact.zk_eval(params.sigma, x)
        peak = exact.zk_eval(params.sigma, 0.0)
        region = lambda x: exact.zk_eval(params.sigma, x) > 0.2 * peak
    guess_builder = None
    if kind is not RegimeKind.LS:
        guess_builder = lambda m: _solve_structure(cfg, params, k, m).theta
    study = convergence_study(
        params, k, meshes, guess_builder=guess_builder, reference=reference, region=region
    )
    summary.section(
        "convergence",
        h_values=",".join(_fmt(h) for h in study.h_values),
        errors=",".join(_fmt(e) for e in study.errors),
        orders=",".join(_fmt(o) for o in study.orders),
        fitted_order=_fmt(study.fitted_order),
        inconclusive=study.inconclusive,
    )
    return []


def run(cfg: ExperimentConfig, outdir: Path | None = None) -> int:
    """Execute a scenario; returns the process exit code."""
    outdir = Path(outdir) if outdir is not None else Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = Summary()
    started = time.perf_counter()
    status, code, error = "ok", EXIT_OK, ""
    written: list = []
    try:
        runner = {
            "classify": _scenario_classify,
            "selfsim": _scenario_selfsim,
            "evolve": _scenario_evolve,
            "stability": _scenario_stability,
            "convergence": _scenario_convergence,
        }[cfg.scenario]
        written = runner(cfg, outdir, summary)
        for path, header in written:
            validate_csv(path, header)
    except ConfigError as err:
        status, code, error = "config_error", EXIT_CONFIG, str(err)
    except HeatstructError as err:
        status, code, error = "solver_error", EXIT_SOLVER, f"{type(err).__name__}: {err}"

    head = Summary()
    head.section(
        "run",
        scenario=cfg.scenario,
        status=status,
        error=error,
        elapsed_seconds=f"{time.perf_counter() - started:.3f}",
        outputs=",".join(p.name for p, _ in written),
    )
    head.section(
        "params",
        sigma=_fmt(cfg.sigma),
        beta=_fmt(cfg.beta),
        dim=cfg.dim,
        t0=_fmt(cfg.params().t0) if status != "config_error" else str(cfg.t0),
    )
    head.sections += summary.sections
    head.write(outdir / "summary.txt")
    if error:
        print(error, file=sys.stderr)
    return code


# ----------------------------------------------------------------------------
# pinned reproduction scenarios

def _cfg(**kw) -> ExperimentConfig:
    return ExperimentConfig(**kw)


def reproduce(name: str, outdir: Path) -> int:
    """Run one of the pinned scenario bundles into outdir/<name>/."""
    ls = exact.fundamental_length(2.0)
    outdir = Path(outdir) / name
    outdir.mkdir(parents=True, exist_ok=True)

    if name in ("fig1", "fig2"):
        # S-regime (fig1) and HS-regime (fig2) profiles for N = 1, 2, 3
        beta = 3.0 if name == "fig1" else 2.4
        geom = {
            ("fig1", 1): dict(l=0.75 * ls, h=0.75 * ls / 300),
            ("fig1", 2): dict(l=5.0, h=5.0 / 450),
            ("fig1", 3): dict(l=5.5, h=5.5 / 450),
            ("fig2", 1): dict(l=6.0, h=0.0125),
            ("fig2", 2): dict(l=6.0, h=0.0125),
            ("fig2", 3): dict(l=6.0, h=0.0125),
        }
        guesses = {
            ("fig1", 1): (1.2, 1.0),
            ("fig1", 2): (1.3, 1.1),
            ("fig1", 3): (1.5, 1.25),
            ("fig2", 1): (1.45, 0.87),
            ("fig2", 2): (1.94, 1.0),
            ("fig2", 3): (1.3, 1.4),
        }
        summary = Summary()
        written = []
        status, code, error = "ok", EXIT_OK, ""
        try:
            for dim in (1, 2, 3):
                amp, stretch = guesses[(name, dim)]
                cfg = _cfg(
                    scenario="selfsim", sigma=2.0, beta=beta, dim=dim, k=(1,),
                    guess_amp=amp, guess_stretch=stretch, **geom[(name, dim)],
                )
                written += _scenario_selfsim(cfg, outdir, summary, label=f"N{dim}_")
            for path, header in written:
                validate_csv(path, header)
        except HeatstructError as err:
            status, code, error = "solver_error", EXIT_SOLVER, str(err)
        head = Summary()
        head.section("run", scenario=name, status=status, error=error,
                     outputs=",".join(p.name for p, _ in written))
        head.sections += summary.sections
        head.write(outdir / "summary.txt")
        if error:
            print(error, file=sys.stderr)
        return code

    table = {
        "fig3": _cfg(scenario="selfsim", sigma=2.0, beta=3.6, dim=1, k=(1, 2, 3, 4), l=14.0, h=0.02),
        "fig4": _cfg(scenario="selfsim", sigma=2.0, beta=3.6, dim=3, k=(1, 2, 3, 4), l=14.0, h=0.02),
        "s_localization": _cfg(
            scenario="evolve", sigma=2.0, beta=3.0, dim=1, u0="zk",
            evolve_h=ls / 100, domain_factor=3.0, amplitude_cap=1e30,
            snapshot_umax=(1e1, 1e2, 1e3, 1e4, 1e5, 1e6), fit_hi=1e4,
        ),
        "ls_stability": _cfg(
            scenario="stability", sigma=2.0, beta=3.6, dim=1, l=14.0, h=0.02,
            evolve_h=0.05,
        ),
        "hs_wave": _cfg(
            scenario="evolve", sigma=2.0, beta=2.4, dim=1, u0="selfsim",
            l=6.0, h=0.0125, guess_amp=1.45, guess_stretch=0.87,
            evolve_h=0.045, amplitude_cap=1.5e4,
            snapshot_umax=(1e1, 1e2, 1e3, 1e4),
        ),
    }
    if name not in table:
        print(f"unknown reproduce scenario {name!r}", file=sys.stderr)
        return EXIT_CONFIG
    return run(table[name], outdir)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heatstruct",
        description="Self-similar blow-up structures in a nonlinear heat-conducting medium",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--outdir", type=Path, default=None)
    p_rep = sub.add_parser("reproduce", help="run a pinned scenario bundle")
    p_rep.add_argument(
        "name",
        help="one of fig1, fig2, fig3, fig4, s_localization, ls_stability, hs_wave",
    )
    p_rep.add_argument("--outdir", type=Path, default=Path("out"))
    args = parser.parse_args(argv)

    if args.command == "run":
        try:
            text = args.config.read_text()
        except OSError as err:
            print(f"cannot read config: {err}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            cfg = parse_config(text)
        except ConfigError as err:
            print(f"config error: {err}", file=sys.stderr)
            return EXIT_CONFIG
        return run(cfg, args.outdir)
    return reproduce(args.name, args.outdir)


if __name__ == "__main__":
    raise SystemExit(main())
