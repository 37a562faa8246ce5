import numpy as np
import pytest

from heatstruct import (
    MediumParams,
    ParameterError,
    ZKProfile,
    fundamental_length,
    ls_tail_slope,
    semi_width_exact,
    zk_eval,
    zk_multibump,
)


def test_fundamental_length_and_semi_width():
    ls = fundamental_length(2.0)
    assert ls == pytest.approx(2.0 * np.pi * np.sqrt(3.0) / 2.0)
    xs = semi_width_exact(2.0)
    assert xs == pytest.approx(ls / 3.0)  # arccos(1/2) = pi/3
    assert 0.0 < xs < ls / 2.0


def test_zk_profile_requires_s_regime():
    with pytest.raises(ParameterError):
        ZKProfile.for_params(MediumParams(2.0, 3.6, 1))
    with pytest.raises(ParameterError):
        ZKProfile.for_params(MediumParams(2.0, 3.0, 2))
    prof = ZKProfile.for_params(MediumParams(2.0, 3.0, 1))
    assert prof.semi_width == pytest.approx(semi_width_exact(2.0))


def test_zk_eval_values():
    ls = fundamental_length(2.0)
    assert zk_eval(2.0, 0.0) == pytest.approx(np.sqrt(1.5), abs=1e-12)
    assert zk_eval(2.0, ls / 2.0) == pytest.approx(0.0, abs=1e-12)
    assert zk_eval(2.0, ls / 4.0) == pytest.approx(np.sqrt(0.75), abs=1e-12)
    assert zk_eval(2.0, 0.51 * ls) == 0.0
    assert zk_eval(2.0, -0.51 * ls) == 0.0


def test_zk_eval_even_and_monotone():
    ls = fundamental_length(2.0)
    xi = np.linspace(0.0, ls / 2.0, 200)
    vals = zk_eval(2.0, xi)
    assert np.all(np.diff(vals) < 1e-12)
    assert np.allclose(zk_eval(2.0, -xi), vals)


def test_zk_satisfies_selfsimilar_ode():
    # finite-difference residual of the S-regime equation on the open support;
    # second-order interior formula, so the rate should be about 2 here
    sigma, beta = 2.0, 3.0
    ls = fundamental_length(sigma)
    errs = []
    hs = [1e-3, 5e-4, 2.5e-4]
    for h in hs:
        xi = np.arange(h, 0.45 * ls, h)
        th = zk_eval(sigma, np.concatenate([[xi[0] - h], xi, [xi[-1] + h]]))
        g = th ** (sigma + 1.0) / (sigma + 1.0)
        diff = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / h**2
        resid = -diff + th[1:-1] - th[1:-1] ** beta
        errs.append(np.max(np.abs(resid)))
    rate = np.log(errs[0] / errs[-1]) / np.log(hs[0] / hs[-1])
    assert errs[-1] < 1e-5
    assert rate > 1.0


def test_zk_flux_vanishes_at_front():
    sigma = 2.0
    ls = fundamental_length(sigma)
    front = ls / 2.0
    h = 1e-7
    for d in [1e-2, 1e-3, 1e-4]:
        xi = front - d
        flux = zk_eval(sigma, xi) ** sigma * (zk_eval(sigma, xi + h) - zk_eval(sigma, xi - h)) / (2 * h)
        # theta ~ d, so theta^sigma * theta' ~ d^2 for sigma = 2
        assert abs(flux) < 10.0 * d**2


def test_zk_multibump_basic():
    sigma = 2.0
    ls = fundamental_length(sigma)
    xi = np.linspace(0.0, 3 * ls, 500)
    assert np.allclose(zk_multibump(sigma, 1, xi), zk_eval(sigma, xi))

    # k = 2: first bump centered at ls/2, junction at the origin-side front
    assert zk_multibump(sigma, 2, ls / 2.0) == pytest.approx(np.sqrt(1.5), abs=1e-12)
    assert zk_multibump(sigma, 2, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert zk_multibump(sigma, 2, ls) == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(ParameterError):
        zk_multibump(sigma, 0, xi)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_zk_multibump_support_and_crossings(k):
    from heatstruct.linear_init import count_level_crossings

    sigma = 2.0
    ls = fundamental_length(sigma)
    xi = np.linspace(0.0, (k + 1) * ls, 4000)
    vals = zk_multibump(sigma, k, xi)
    support = xi[vals > 0]
    assert support.max() < k * ls / 2.0 + 1e-6
    assert count_level_crossings(vals, 1.0) == k


def test_ls_tail_slope():
    p = MediumParams(2.0, 3.6, 1)
    got = ls_tail_slope(p, 10.0, 0.01)
    assert got == pytest.approx(-(2.0 / 0.6) * 0.01 / 10.0, rel=1e-12)
    assert ls_tail_slope(p, 5.0, 0.0) == 0.0
    assert ls_tail_slope(p, 10.0, 0.02) == pytest.approx(2.0 * got, rel=1e-12)
    assert ls_tail_slope(p, 20.0, 0.01) == pytest.approx(0.5 * got, rel=1e-12)

    with pytest.raises(ParameterError):
        ls_tail_slope(MediumParams(2.0, 3.0, 1), 1.0, 0.1)
    with pytest.raises(ParameterError):
        ls_tail_slope(p, -1.0, 0.1)
