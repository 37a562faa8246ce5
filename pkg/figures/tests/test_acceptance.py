"""Secondary acceptance: render every pinned reproduction scenario.

The solver is exercised only through its command line (`heatstruct reproduce`)
and its CSV files; nothing is imported from it.
"""

import subprocess
import sys

import numpy as np
import pytest

from heatfigs import PlotSpec, load_profile, load_series, render

SCENARIOS = ("fig1", "fig2", "fig3", "fig4", "s_localization", "ls_stability", "hs_wave")


@pytest.fixture(scope="session")
def scenario_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("reproduce")
    for name in SCENARIOS:
        proc = subprocess.run(
            ["heatstruct", "reproduce", name, "--outdir", str(root)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, f"{name} failed: {proc.stderr}"
    return root


def test_B1_all_scenarios_render(scenario_dir, tmp_path):
    rendered = []
    for name in ("fig1", "fig2", "fig3", "fig4"):
        profiles = sorted((scenario_dir / name).glob("profile_*.csv"))
        assert profiles, f"{name} produced no profiles"
        out = tmp_path / f"{name}.png"
        render(PlotSpec(inputs=profiles, kind="profiles", output=out))
        rendered.append(out)
    for name in ("s_localization", "hs_wave"):
        series = scenario_dir / name / "series.csv"
        out = tmp_path / f"{name}.png"
        render(PlotSpec(inputs=[series], kind="series", output=out))
        rendered.append(out)
    for run in sorted((scenario_dir / "ls_stability").glob("factor_*")):
        reps = sorted(run.glob("rep_*.csv"))
        out = tmp_path / f"overlay_{run.name}.png"
        render(
            PlotSpec(
                inputs=reps,
                kind="representation_overlay",
                output=out,
                reference=scenario_dir / "ls_stability" / "reference.csv",
            )
        )
        rendered.append(out)
        render(
            PlotSpec(inputs=[run / "series.csv"], kind="series", output=tmp_path / f"series_{run.name}.png")
        )
    assert all(p.exists() and p.stat().st_size > 0 for p in rendered)
    print(f"B1: PASS — rendered {len(rendered)} figures from all reproduce scenarios")


def test_B1_fig3_panel_structure(scenario_dir):
    profiles = sorted((scenario_dir / "fig3").glob("profile_k*.csv"))
    assert len(profiles) == 4
    x1, v1 = load_profile(profiles[0])
    assert np.all(np.diff(v1) < 0), "first LS structure must be monotone"
    # distinct curves
    curves = [load_profile(p)[1] for p in profiles]
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.max(np.abs(curves[i] - curves[j])) > 0.05


def test_B1_overlay_deviation_decreases(scenario_dir):
    ref_x, ref_v = load_profile(scenario_dir / "ls_stability" / "reference.csv")
    bulk = ref_v > 1e-3 * ref_v.max()
    run = scenario_dir / "ls_stability" / "factor_1.20"
    reps = sorted(run.glob("rep_*.csv"))
    assert len(reps) >= 4
    devs = []
    for rep in reps:
        _, v = load_profile(rep)
        devs.append(float(np.max(np.abs(v[bulk] - ref_v[bulk])) / ref_v.max()))
    assert devs[-1] < devs[0] / 5.0, f"deviation did not collapse: {devs}"
    assert all(b <= a * 1.10 + 1e-4 for a, b in zip(devs, devs[1:])), devs
    print(f"B1 overlay: PASS — snapshot deviations {['%.2e' % d for d in devs]}")
