"""Plot renderers for the three CSV schemas the solver CLI emits.

Input schemas (consumed verbatim):

- profiles:  header ``xi,theta`` (or ``x,u`` for evolution snapshots)
- series:    header ``t,umax,xs,xf,X,tau,nnodes,gamma,dev``
- representation overlays: profile schema, one file per snapshot, plus a
  reference profile

Rendering is deterministic for fixed inputs: a pinned style, no timestamps in
the image metadata, and a fixed hash salt for SVG ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SERIES_COLUMNS = ("t", "umax", "xs", "xf", "X", "tau", "nnodes", "gamma", "dev")
PROFILE_HEADERS = (("xi", "theta"), ("x", "u"))

_STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "svg.hashsalt": "heatfigs",
}


class SchemaError(Exception):
    """A CSV does not match its declared schema; names the offending column."""


def _read_rows(path: Path, expected: tuple) -> np.ndarray:
    try:
        text = path.read_text().strip().splitlines()
    except OSError as err:
        raise SchemaError(f"{path}: cannot read ({err})") from err
    if not text:
        raise SchemaError(f"{path}: empty file, expected header {','.join(expected)}")
    got = tuple(c.strip() for c in text[0].split(","))
    if got != tuple(expected):
        missing = [c for c in expected if c not in got]
        extra = [c for c in got if c not in expected]
        if missing:
            raise SchemaError(f"{path}: missing column '{missing[0]}'")
        if extra:
            raise SchemaError(f"{path}: unexpected column '{extra[0]}'")
        raise SchemaError(f"{path}: column order mismatch ({','.join(got)})")
    if len(text) < 2:
        raise SchemaError(f"{path}: no data rows")
    try:
        data = np.loadtxt(text[1:], delimiter=",", ndmin=2)
    except ValueError as err:
        raise SchemaError(f"{path}: malformed numeric row ({err})") from err
    if data.shape[1] != len(expected):
        raise SchemaError(f"{path}: rows have {data.shape[1]} columns, expected {len(expected)}")
    return data


def load_profile(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a profile CSV (xi,theta or x,u); returns (x, values)."""
    path = Path(path)
    try:
        first = path.read_text().strip().splitlines()[0]
    except (OSError, IndexError) as err:
        raise SchemaError(f"{path}: empty or unreadable ({err})") from err
    got = tuple(c.strip() for c in first.split(","))
    header = PROFILE_HEADERS[1] if got == PROFILE_HEADERS[1] else PROFILE_HEADERS[0]
    data = _read_rows(path, header)
    return data[:, 0], data[:, 1]


def load_series(path: Path) -> dict:
    data = _read_rows(Path(path), SERIES_COLUMNS)
    return {name: data[:, i] for i, name in enumerate(SERIES_COLUMNS)}


@dataclass
class PlotSpec:
    """One rendering request: input CSVs, plot kind, scales, output path."""

    inputs: list
    kind: str  # profiles | series | representation_overlay
    output: Path
    logx: bool = False
    logy: bool = False
    labels: list = field(default_factory=list)
    reference: Path | None = None  # overlay only
    beta: float | None = None  # series amplitude guide line
    t0: float | None = None

    def __post_init__(self):
        self.inputs = [Path(p) for p in self.inputs]
        self.output = Path(self.output)
        if self.kind not in ("profiles", "series", "representation_overlay"):
            raise SchemaError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("no input CSVs given")
        if self.kind == "representation_overlay" and self.reference is None:
            raise SchemaError("representation_overlay needs --reference")


def _label_for(spec: PlotSpec, i: int) -> str:
    if i < len(spec.labels):
        return spec.labels[i]
    return spec.inputs[i].stem


def _render_profiles(spec: PlotSpec, fig):
    ax = fig.subplots()
    for i, path in enumerate(spec.inputs):
        x, v = load_profile(path)
        ax.plot(x, v, label=_label_for(spec, i))
    ax.set_xlabel("xi")
    ax.set_ylabel("theta")
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.legend(fontsize=8)


def _render_series(spec: PlotSpec, fig):
    axes = fig.subplots(2, 2)
    for i, path in enumerate(spec.inputs):
        s = load_series(path)
        label = _label_for(spec, i)
        ax = axes[0, 0]
        if spec.beta is not None and spec.t0 is not None:
            left = np.maximum(spec.t0 - s["t"], 1e-300)
            ax.loglog(left, s["umax"], label=label)
            ax.set_xlabel("t0 - t")
        else:
            ax.semilogy(s["t"], s["umax"], label=label)
            ax.set_xlabel("t")
        ax.set_ylabel("max u")

        axes[0, 1].plot(s["t"], s["xs"], label=f"{label} xs")
        axes[0, 1].plot(s["t"], s["xf"], "--", label=f"{label} xf")
        axes[0, 1].set_xlabel("t")
        axes[0, 1].set_ylabel("semi-width / front")

        dev = s["dev"]
        if np.any(np.isfinite(dev)):
            ok = np.isfinite(dev)
            axes[1, 0].semilogx(s["gamma"][ok], dev[ok], label=label)
            axes[1, 0].set_xlabel("amplitude ratio")
            axes[1, 0].set_ylabel("deviation norm")
        else:
            axes[1, 0].plot(s["t"], s["X"], label=f"{label} X")
            axes[1, 0].set_xlabel("t")
            axes[1, 0].set_ylabel("domain edge")

        axes[1, 1].semilogy(s["t"], s["tau"], label=label)
        axes[1, 1].set_xlabel("t")
        axes[1, 1].set_ylabel("step size")

    if spec.beta is not None and spec.t0 is not None:
        # reference slope -1/(beta-1) guide for the amplitude law
        s0 = load_series(spec.inputs[0])
        left = np.maximum(spec.t0 - s0["t"], 1e-300)
        sel = s0["umax"] > 0
        anchor = max(1, int(np.count_nonzero(sel) // 2))
        c = s0["umax"][sel][anchor] * left[sel][anchor] ** (1.0 / (spec.beta - 1.0))
        guide = c * left[sel] ** (-1.0 / (spec.beta - 1.0))
        axes[0, 0].loglog(left[sel], guide, "k:", label="slope -1/(beta-1)")
    for ax in axes.ravel():
        if ax.lines:
            ax.legend(fontsize=7)


def _render_overlay(spec: PlotSpec, fig):
    ax = fig.subplots()
    rx, rv = load_profile(spec.reference)
    for i, path in enumerate(spec.inputs):
        x, v = load_profile(path)
        ax.plot(x, v, alpha=0.8, label=_label_for(spec, i))
    ax.plot(rx, rv, "k--", linewidth=2.0, label="reference")
    ax.set_xlabel("xi")
    ax.set_ylabel("theta")
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.legend(fontsize=8)


def render(spec: PlotSpec):
    """Render the spec to its output path; returns the matplotlib figure."""
    with plt.rc_context(_STYLE):
        fig = plt.figure(figsize=(7.2, 5.4) if spec.kind == "series" else (6.4, 4.4))
        try:
            if spec.kind == "profiles":
                _render_profiles(spec, fig)
            elif spec.kind == "series":
                _render_series(spec, fig)
            else:
                _render_overlay(spec, fig)
            fig.tight_layout()
            spec.output.parent.mkdir(parents=True, exist_ok=True)
            metadata = {"Software": None} if spec.output.suffix == ".png" else {}
            fig.savefig(spec.output, metadata=metadata)
        except Exception:
            plt.close(fig)
            raise
    plt.close(fig)
    return spec.output
