import math

import numpy as np
import pytest

from heatstruct import (
    ConvergenceError,
    MediumParams,
    ParameterError,
    bessel_j,
    build_guess,
    kummer_1f1,
    linearized_profile,
)
from heatstruct.exact import fundamental_length
from heatstruct.linear_init import (
    confluent_0f1,
    count_level_crossings,
    kummer_parameters,
    linearized_profile_derivative,
)
from heatstruct.selfsim import Mesh1D


class TestKummer:
    def test_trivial_values(self):
        assert kummer_1f1(0.3, 0.7, 0.0) == 1.0
        assert kummer_1f1(1.0, 1.0, 1.0) == pytest.approx(math.e, rel=1e-14)
        assert kummer_1f1(-1.0, 2.0, 3.0) == pytest.approx(-0.5, rel=1e-14)

    def test_rejects_nonpositive_integer_b(self):
        for b in (0.0, -1.0, -3.0):
            with pytest.raises(ParameterError):
                kummer_1f1(0.5, b, 1.0)

    def test_signals_budget_exhaustion(self):
        with pytest.raises(ConvergenceError):
            kummer_1f1(0.5, 1.5, 1e4)

    def test_contiguous_relation(self):
        # 1F1(a,b,z) = 1F1(a-1,b,z) + (z/b) 1F1(a,b+1,z) over the working domain
        rng = np.random.default_rng(1234)
        for _ in range(100):
            a = rng.uniform(-8.0, 4.0)
            b = rng.uniform(0.3, 4.0)
            z = rng.uniform(-40.0, 40.0)
            lhs = kummer_1f1(a, b, z)
            rhs = kummer_1f1(a - 1.0, b, z) + (z / b) * kummer_1f1(a, b + 1.0, z)
            assert rhs == pytest.approx(lhs, rel=1e-8, abs=1e-12)

    def test_derivative_identity(self):
        # d/dz 1F1 = (a/b) 1F1(a+1, b+1, z) against central differences
        rng = np.random.default_rng(99)
        for _ in range(50):
            a = rng.uniform(-6.0, 3.0)
            b = rng.uniform(0.4, 3.0)
            z = rng.uniform(-20.0, 20.0)
            h = 1e-5 * max(1.0, abs(z))
            fd = (kummer_1f1(a, b, z + h) - kummer_1f1(a, b, z - h)) / (2.0 * h)
            exact = (a / b) * kummer_1f1(a + 1.0, b + 1.0, z)
            assert exact == pytest.approx(fd, rel=1e-6, abs=1e-8)

    def test_vector_argument(self):
        z = np.array([0.0, 1.0, 2.5])
        vals = kummer_1f1(1.0, 1.0, z)
        assert np.allclose(vals, np.exp(z), rtol=1e-13)


def _series_j0(z: float) -> float:
    # independent straightforward evaluation of the defining series
    total, term = 1.0, 1.0
    for j in range(1, 200):
        term *= -(z * z / 4.0) / (j * j)
        total += term
        if abs(term) < 1e-18:
            break
    return total


class TestBessel:
    def test_trivial_values(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(3, 0.0) == 0.0

    def test_rejects_bad_order(self):
        with pytest.raises(ParameterError):
            bessel_j(-1, 1.0)

    def test_first_zero_of_j0(self):
        # oracle: sign-change bisection on an independently coded series
        lo, hi = 2.0, 3.0
        assert _series_j0(lo) > 0 > _series_j0(hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _series_j0(mid) > 0:
                lo = mid
            else:
                hi = mid
        oracle_zero = 0.5 * (lo + hi)

        lo, hi = 2.0, 3.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if bessel_j(0, mid) > 0:
                lo = mid
            else:
                hi = mid
        our_zero = 0.5 * (lo + hi)
        assert our_zero == pytest.approx(oracle_zero, abs=1e-9)
        assert our_zero == pytest.approx(2.404826, abs=1e-6)

    def test_series_asymptotic_seam(self):
        # both evaluation branches agree where the switch happens
        from heatstruct.linear_init import _bessel_hankel, _bessel_series

        for k in (0, 1, 2):
            s = float(_bessel_series(k, np.array(14.0)))
            h = _bessel_hankel(k, 14.0)
            assert s == pytest.approx(h, abs=1e-10)

    def test_negative_argument_parity(self):
        assert bessel_j(0, -3.1) == pytest.approx(bessel_j(0, 3.1), rel=1e-12)
        assert bessel_j(1, -3.1) == pytest.approx(-bessel_j(1, 3.1), rel=1e-12)

    def test_matches_0f1_representation(self):
        # J_0(x) = 0F1(; 1; -x^2/4)
        for x in (0.5, 1.7, 4.0, 9.0):
            assert bessel_j(0, x) == pytest.approx(
                float(confluent_0f1(1.0, np.array(-x * x / 4.0))), rel=1e-9, abs=1e-12
            )


def _linearized_ode_residual(params, xi, y):
    # -y'' - ((N-1)/xi) y' + m xi y' + (1-beta) y via second-order differences
    h = xi[1] - xi[0]
    d1 = (y[2:] - y[:-2]) / (2 * h)
    d2 = (y[2:] - 2 * y[1:-1] + y[:-2]) / h**2
    mid = xi[1:-1]
    return (
        -d2
        - (params.dim - 1.0) / mid * d1
        + params.m * mid * d1
        + (1.0 - params.beta) * y[1:-1]
    )


class TestLinearizedProfile:
    @pytest.mark.parametrize(
        "sigma, beta, dim",
        [(2.0, 3.6, 1), (2.0, 3.6, 3), (2.0, 2.4, 1), (2.0, 3.0, 1), (2.0, 3.0, 2), (2.0, 3.0, 3)],
    )
    def test_normalization_and_symmetry(self, sigma, beta, dim):
        p = MediumParams(sigma, beta, dim)
        xi = np.linspace(0.0, 2.0, 2001)
        y = linearized_profile(p, xi)
        assert y[0] == pytest.approx(1.0, abs=1e-14)
        # one-sided parabolic estimate of y'(0)
        h = xi[1]
        d0 = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h)
        assert abs(d0) < 1e-8

    @pytest.mark.parametrize("sigma, beta, dim", [(2.0, 3.6, 1), (2.0, 2.4, 2), (2.0, 3.0, 3)])
    def test_ode_residual_second_order(self, sigma, beta, dim):
        p = MediumParams(sigma, beta, dim)
        errs = []
        hs_ = [4e-3, 2e-3, 1e-3]
        for h in hs_:
            xi = np.arange(0.5, 3.0 + h / 2, h)
            y = linearized_profile(p, xi)
            errs.append(np.max(np.abs(_linearized_ode_residual(p, xi, y))))
        rate = np.log(errs[0] / errs[-1]) / np.log(hs_[0] / hs_[-1])
        assert 1.6 < rate < 2.4

    def test_derivative_consistency(self):
        p = MediumParams(2.0, 3.6, 1)
        xi = np.linspace(0.1, 8.0, 400)
        y = linearized_profile(p, xi)
        dy = linearized_profile_derivative(p, xi)
        fd = np.gradient(y, xi)
        assert np.max(np.abs(dy[2:-2] - fd[2:-2])) < 5e-3 * np.max(np.abs(dy))

    def test_oscillation_count_supports_four_structures(self):
        # for sigma=2, beta=3.6 the refined count is 4; the oscillation must
        # provide at least that many sign changes on the working grid
        p = MediumParams(2.0, 3.6, 1)
        xi = np.linspace(0.0, 14.0, 2801)
        y = linearized_profile(p, xi)
        assert count_level_crossings(y, 0.0) >= 4

    def test_requires_normalized_t0(self):
        with pytest.raises(ParameterError):
            linearized_profile(MediumParams(2.0, 3.6, 1, t0=1.0), np.linspace(0, 1, 20))

    def test_kummer_parameters(self):
        p = MediumParams(2.0, 3.6, 1)
        a, b = kummer_parameters(p)
        assert a == pytest.approx(-(3.6 - 1.0) / 0.6, rel=1e-14)
        assert b == 0.5
        with pytest.raises(ParameterError):
            kummer_parameters(MediumParams(2.0, 3.0, 1))


class TestBuildGuess:
    def setup_method(self):
        self.params = MediumParams(2.0, 3.6, 1)
        self.mesh = Mesh1D.uniform(14.0, 700)

    def test_k1_monotone_after_clamp(self):
        g = build_guess(self.params, 1, self.mesh)
        assert g.crossings == 1
        assert np.all(np.diff(g.values) <= 1e-12)
        assert np.all(g.values >= 0)

    def test_k2_crossing_structure(self):
        g = build_guess(self.params, 2, self.mesh)
        assert g.crossings == 2
        assert g.alpha < 0  # even structures start below the homogeneous level
        assert g.values[0] < 1.0

    def test_tail_matches_power_law(self):
        g = build_guess(self.params, 1, self.mesh)
        xi = self.mesh.nodes
        tail = xi > g.sew_point
        p = 2.0 / (self.params.beta - self.params.sigma - 1.0)
        c = g.values[tail][0] * xi[tail][0] ** p
        assert np.allclose(g.values[tail], c * xi[tail] ** (-p), rtol=1e-12)

    def test_s_regime_routes_to_multibump(self):
        from heatstruct.exact import zk_multibump

        p = MediumParams(2.0, 3.0, 1)
        ls = fundamental_length(2.0)
        mesh = Mesh1D.uniform(1.5 * ls, 300)
        g = build_guess(p, 2, mesh)
        assert np.allclose(g.values, zk_multibump(2.0, 2, mesh.nodes))
        assert g.crossings == 2

    def test_k_beyond_count_rejected(self):
        with pytest.raises(ParameterError):
            build_guess(self.params, 5, self.mesh)

    def test_hs_regime_not_supported(self):
        with pytest.raises(ParameterError):
            build_guess(MediumParams(2.0, 2.4, 1), 1, self.mesh)
