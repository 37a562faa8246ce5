import numpy as np
import pytest

from heatstruct import InsufficientSeriesError, MediumParams, ParameterError
from heatstruct.diagnostics import (
    DiagnosticsSeries,
    StabilityKind,
    StabilityThresholds,
    deviation_norm,
    front_point,
    semi_width,
    ss_representation,
    ss_representation_known_t0,
    stability_verdict,
)
from heatstruct.exact import fundamental_length, semi_width_exact, zk_eval

LS = fundamental_length(2.0)


class TestSemiWidth:
    def test_triangle_profile(self):
        x = np.linspace(0.0, 1.0, 101)
        u = 2.0 * np.maximum(1.0 - x, 0.0)
        xs, ok = semi_width(x, u)
        assert xs == pytest.approx(0.5, abs=1e-12)
        assert ok

    def test_zk_data(self):
        x = np.linspace(0.0, LS, 2001)
        xs, ok = semi_width(x, zk_eval(2.0, x))
        assert ok
        assert xs == pytest.approx(semi_width_exact(2.0), abs=1e-5)
        assert xs == pytest.approx(LS / 3.0, abs=1e-5)

    def test_constant_profile_flagged(self):
        x = np.linspace(0.0, 1.0, 11)
        xs, ok = semi_width(x, np.ones_like(x))
        assert not ok

    def test_nonmonotone_returns_first_crossing(self):
        # dips below half maximum, then rises above it again
        x = np.linspace(0.0, 4.0, 401)
        u = np.where(x < 1.0, 2.0 - 1.5 * x, np.where(x < 2.0, 0.5 + (x - 1.0), np.maximum(1.5 * (4.0 - x) / 2.0, 0.0)))
        xs, ok = semi_width(x, u)
        assert not ok
        assert xs == pytest.approx(2.0 / 3.0, abs=0.02)  # first half-level crossing


class TestFrontPoint:
    def test_zk_front(self):
        h = LS / 200
        x = np.arange(0.0, 1.5 * LS, h)
        xf, saturated = front_point(x, zk_eval(2.0, x))
        assert not saturated
        assert abs(xf - LS / 2.0) <= h + 1e-12

    def test_zero_profile(self):
        x = np.linspace(0.0, 1.0, 11)
        xf, saturated = front_point(x, np.zeros_like(x))
        assert xf == 0.0 and not saturated

    def test_saturation_flag(self):
        x = np.linspace(0.0, 1.0, 11)
        xf, saturated = front_point(x, np.ones_like(x))
        assert saturated and xf == 1.0


class TestRepresentation:
    def setup_method(self):
        self.params = MediumParams(2.0, 3.6, 1)  # m = 0.3
        self.ref_xi = np.linspace(0.0, 10.0, 1001)
        # synthetic smooth reference profile with a power-law-ish tail
        self.ref_theta = 1.5 / (1.0 + self.ref_xi**2)

    def test_identity_at_start(self):
        gamma, theta = ss_representation(
            self.params, self.ref_xi, self.ref_theta, self.ref_xi, self.ref_theta
        )
        assert gamma == pytest.approx(1.0)
        assert np.allclose(theta, self.ref_theta, atol=1e-13)

    def test_exact_selfsimilar_orbit_collapses(self):
        # analytic samples of u_s(t, x) = phi theta(x/psi) map back onto theta
        p = self.params
        for t in (0.1, 0.25, 0.35):
            s = 1.0 - t / p.t0
            phi = s ** (-1.0 / (p.beta - 1.0))
            psi = s ** (p.m / (p.beta - 1.0))
            x = np.linspace(0.0, 10.0 * psi, 4001)
            u = phi * np.interp(x / psi, self.ref_xi, self.ref_theta, right=0.0)
            gamma, theta = ss_representation(p, x, u, self.ref_xi, self.ref_theta)
            assert gamma == pytest.approx(phi, rel=1e-12)
            mask = self.ref_xi < 8.0
            assert np.max(np.abs(theta[mask] - self.ref_theta[mask])) < 1e-4

    def test_m_zero_is_pure_rescale(self):
        p = MediumParams(2.0, 3.0, 1)
        u = 7.0 * self.ref_theta
        gamma, theta = ss_representation(p, self.ref_xi, u, self.ref_xi, self.ref_theta)
        assert gamma == pytest.approx(7.0)
        assert np.allclose(theta, self.ref_theta, atol=1e-12)

    def test_known_t0_identity_at_zero(self):
        p = self.params
        xi, theta = ss_representation_known_t0(p, 0.0, self.ref_xi, self.ref_theta, p.t0)
        assert np.allclose(xi, self.ref_xi)
        assert np.allclose(theta, self.ref_theta)

    def test_known_t0_matches_gamma_form_on_orbit(self):
        p = self.params
        t = 0.2
        s = 1.0 - t / p.t0
        phi = s ** (-1.0 / (p.beta - 1.0))
        psi = s ** (p.m / (p.beta - 1.0))
        x = np.linspace(0.0, 10.0 * psi, 4001)
        u = phi * np.interp(x / psi, self.ref_xi, self.ref_theta, right=0.0)
        xi_a, th_a = ss_representation_known_t0(p, t, x, u, p.t0)
        _, th_b = ss_representation(p, x, u, self.ref_xi, self.ref_theta)
        th_a_on_ref = np.interp(self.ref_xi, xi_a, th_a)
        mask = self.ref_xi < 8.0
        assert np.max(np.abs(th_a_on_ref[mask] - th_b[mask])) < 1e-4

    def test_known_t0_rejects_late_times(self):
        with pytest.raises(ParameterError):
            ss_representation_known_t0(self.params, 1.0, self.ref_xi, self.ref_theta, 0.5)


def _synthetic_series(gammas, devs, refmax=1.0):
    s = DiagnosticsSeries()
    t = 0.0
    for g, d in zip(gammas, devs):
        t += 0.01
        s.append(t, g * refmax, 1.0, 2.0, 10.0, 1e-3, 100, g, d)
    return s


REF = (np.linspace(0, 5, 50), np.ones(50))


class TestVerdict:
    def test_structurally_stable(self):
        g = np.geomspace(1.0, 2e3, 400)
        dev = 0.04 / g**0.3
        v = stability_verdict(_synthetic_series(g, dev), REF)
        assert v.kind is StabilityKind.STRUCTURALLY_STABLE
        assert v.final_deviation < 0.01

    def test_metastable(self):
        g = np.geomspace(1.0, 2e4, 600)
        dev = np.where(g < 5e3, 0.01, 0.01 * (g / 5e3) ** 2)
        v = stability_verdict(_synthetic_series(g, dev), REF)
        assert v.kind is StabilityKind.METASTABLE
        assert v.hold_until_gamma >= 1e3

    def test_divergent(self):
        g = np.geomspace(1.0, 2e3, 400)
        dev = 0.01 * g**0.5
        v = stability_verdict(_synthetic_series(g, dev), REF)
        assert v.kind is StabilityKind.DIVERGENT

    def test_insufficient_growth(self):
        g = np.geomspace(1.0, 50.0, 100)
        dev = np.full_like(g, 0.01)
        with pytest.raises(InsufficientSeriesError):
            stability_verdict(_synthetic_series(g, dev), REF)


class TestSeries:
    def test_strictly_increasing_time(self):
        s = DiagnosticsSeries()
        s.append(0.0, 1, 1, 1, 1, 1e-3, 10, 1.0)
        with pytest.raises(ParameterError):
            s.append(0.0, 1, 1, 1, 1, 1e-3, 10, 1.0)

    def test_deviation_norm_restricted_to_bulk(self):
        ref = np.concatenate([np.ones(50), np.full(50, 1e-5)])
        theta = ref.copy()
        theta[60] += 100.0  # huge error in the negligible tail is ignored
        assert deviation_norm(ref, theta) == 0.0
        theta[10] += 0.05
        assert deviation_norm(ref, theta) == pytest.approx(0.05)


class TestExactRunVerdict:
    def test_exact_selfsimilar_run_structurally_stable(self):
        # a run from the exact profile keeps its shape; the final deviation is
        # pure interpolation error
        from heatstruct.evolve import EvolveOptions, run_to_blowup

        p = MediumParams(2.0, 3.0, 1)
        h = LS / 50
        X = 1.5 * LS
        x = np.linspace(0.0, X, int(round(X / h)) + 1)
        u0 = zk_eval(2.0, x)
        series, _ = run_to_blowup(
            p,
            (x, u0),
            EvolveOptions(amplitude_cap=1.05e3 * u0.max()),
            reference=(x, u0),
        )
        v = stability_verdict(series, (x, u0))
        assert v.kind is StabilityKind.STRUCTURALLY_STABLE
        assert v.final_deviation < 5e-3


class TestGammaConsistency:
    def test_gamma_matches_amplitude_ratio_for_selfsimilar_start(self):
        # Eq.-(17) gamma and the adaptation ratio Gamma coincide when the run
        # starts from the reference profile itself
        from heatstruct.evolve import EvolveOptions, run_to_blowup

        p = MediumParams(2.0, 3.0, 1)
        h = LS / 50
        X = 1.5 * LS
        x = np.linspace(0.0, X, int(round(X / h)) + 1)
        u0 = zk_eval(2.0, x)
        series, _ = run_to_blowup(
            p, (x, u0), EvolveOptions(amplitude_cap=100.0), reference=(x, u0)
        )
        a = series.as_arrays()
        gamma17 = a["umax"] / u0.max()
        assert np.max(np.abs(gamma17 - a["gamma"])) < 1e-12
