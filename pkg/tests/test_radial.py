import math

import numpy as np
import pytest
from scipy import stats as sps

from su2meas.errors import DivergentMoment, ProfileFormatError, ZeroMass
from su2meas.radial import (
    NORMALIZED_M3,
    BallUniformProfile,
    CallableProfile,
    ExponentialProfile,
    GaussianProfile,
    TabulatedProfile,
    abs_cdf,
    abs_density,
    abs_quantile,
    load_tabulated,
    moment,
    normalize,
    parse_profile,
    third_moment,
)

from .conftest import builtin_profiles, random_tabulated

PI2 = math.pi**2


def gaussian_cdf_closed(l):
    return 1.0 - (l * l / 2.0 + 1.0) * math.exp(-l * l / 2.0)


# -- third moment -------------------------------------------------------------


def test_gaussian_third_moment_both_paths():
    g = GaussianProfile()
    assert third_moment(g) == pytest.approx(1 / (2 * PI2), rel=1e-10)
    assert third_moment(g, method="quadrature") == pytest.approx(1 / (2 * PI2), rel=1e-10)


def test_ball_third_moment():
    assert third_moment(BallUniformProfile(1.0, amplitude=3.0)) == pytest.approx(0.75, rel=1e-15)
    assert third_moment(BallUniformProfile(1.0, amplitude=3.0), method="quadrature") == pytest.approx(0.75, rel=1e-10)


def test_zero_tabulated():
    z = TabulatedProfile([0.0, 1.0, 2.0], [0.0, 0.0, 0.0])
    assert third_moment(z) == 0.0
    with pytest.raises(ZeroMass):
        normalize(z)


@pytest.mark.parametrize("name", sorted(builtin_profiles()))
def test_closed_form_matches_quadrature(name):
    f = builtin_profiles()[name]
    assert third_moment(f, method="analytic") == pytest.approx(third_moment(f, method="quadrature"), rel=1e-10)


def test_exponential_third_moment_is_gamma():
    assert third_moment(ExponentialProfile(2.5)) == pytest.approx(math.gamma(4) / 2.5**4, rel=1e-14)


def test_divergent_callable():
    with pytest.raises(DivergentMoment):
        CallableProfile(lambda x: 1.0 / (1.0 + x) ** 4)


def test_callable_requires_quadrature_for_analytic():
    c = CallableProfile(lambda x: math.exp(-x))
    assert third_moment(c) == pytest.approx(6.0, rel=1e-10)
    with pytest.raises(ValueError):
        third_moment(c, method="analytic")


def test_lower_moments():
    g = GaussianProfile()
    amp = 1 / (4 * PI2)
    assert moment(g, 0) == pytest.approx(amp * math.sqrt(math.pi / 2), rel=1e-10)
    assert moment(g, 1) == pytest.approx(amp, rel=1e-10)
    assert moment(g, 2) == pytest.approx(amp * math.sqrt(math.pi / 2), rel=1e-10)
    with pytest.raises(ValueError):
        moment(g, 4)


# -- normalization ---------------------------------------------------------------


def test_normalize_examples():
    assert normalize(GaussianProfile()).scale == pytest.approx(1.0, rel=1e-14)
    assert normalize(BallUniformProfile(1.0)).scale == pytest.approx(2 / PI2, rel=1e-14)
    assert normalize(2 * GaussianProfile()).scale == pytest.approx(0.5, rel=1e-14)


def _random_profiles(rng, kind):
    for _ in range(20):
        if kind == "gaussian":
            yield GaussianProfile(amplitude=rng.uniform(0.01, 10))
        elif kind == "exponential":
            yield ExponentialProfile(rate=rng.uniform(0.2, 5), amplitude=rng.uniform(0.01, 10))
        elif kind == "ball":
            yield BallUniformProfile(radius=rng.uniform(0.1, 10), amplitude=rng.uniform(0.01, 10))
        else:
            size = int(rng.integers(2, 40))
            grid = np.sort(rng.uniform(0, 8, size))
            yield TabulatedProfile(np.unique(grid), rng.random(np.unique(grid).size) + 0.01)


@pytest.mark.parametrize("kind", ["gaussian", "exponential", "ball", "tabulated"])
def test_normalized_third_moment(kind):
    rng = np.random.default_rng(hash(kind) % 2**32)
    for f in _random_profiles(rng, kind):
        nf = normalize(f)
        m3 = third_moment(nf.as_profile(), method="quadrature")
        assert abs(m3 / NORMALIZED_M3 - 1.0) <= 1e-8


# -- density, cdf, quantile ---------------------------------------------------


@pytest.mark.parametrize("l", [0.0, 0.3, 1.0, 2.5, 6.0])
def test_gaussian_abs_density(l):
    nf = normalize(GaussianProfile())
    assert abs_density(nf, l) == pytest.approx(0.5 * l**3 * math.exp(-l * l / 2), abs=1e-15)


def test_ball_abs_density_at_edge():
    nf = normalize(BallUniformProfile(1.0))
    assert abs_density(nf, 1.0) == pytest.approx(4.0, rel=1e-14)
    assert abs_density(nf, 1.5) == 0.0


@pytest.mark.parametrize("name", sorted(builtin_profiles()))
def test_density_integrates_to_one(name):
    nf = normalize(builtin_profiles()[name])
    f = nf.as_profile()
    from su2meas.quadrature import integrate_piecewise

    knots = [0.0, *[b for b in f.breakpoints() if 0 < b < nf.l_max], nf.l_max]
    total = integrate_piecewise(lambda l: float(abs_density(nf, l)), knots)
    assert abs(total - 1.0) <= 1e-8


@pytest.mark.parametrize("l", np.linspace(0.0, 8.0, 33))
def test_gaussian_cdf_closed_form(l):
    assert abs_cdf(normalize(GaussianProfile()), l) == pytest.approx(gaussian_cdf_closed(l), abs=1e-15)


def test_gaussian_cdf_against_quadrature():
    from su2meas.quadrature import integrate

    nf = normalize(GaussianProfile())
    for l in (0.2, 1.0, 2.0, 4.0):
        numeric = integrate(lambda q: 0.5 * q**3 * math.exp(-q * q / 2), 0.0, l)
        assert abs(abs_cdf(nf, l) - numeric) <= 1e-10


def test_cdf_limits():
    for f in builtin_profiles().values():
        nf = normalize(f)
        assert abs_cdf(nf, 0.0) == 0.0
        assert abs_cdf(nf, math.inf) == 1.0
        assert abs_cdf(nf, 1e6) == 1.0
        grid = np.linspace(0, nf.l_max * 1.1, 2001)
        assert np.all(np.diff(abs_cdf(nf, grid)) >= 0.0)


def test_exponential_cdf_is_gamma4():
    nf = normalize(ExponentialProfile(1.7))
    l = np.linspace(0, 30, 301)
    np.testing.assert_allclose(abs_cdf(nf, l), sps.gamma(4, scale=1 / 1.7).cdf(l), atol=1e-14)


def test_quantile_examples():
    g = normalize(GaussianProfile())
    assert abs_quantile(g, 0.0) == 0.0
    assert abs_quantile(g, abs_cdf(g, 1.0)) == pytest.approx(1.0, abs=1e-8)
    assert abs_quantile(normalize(BallUniformProfile(1.0)), 1 / 16) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("name", sorted(builtin_profiles()))
def test_quantile_inverts_cdf(name):
    nf = normalize(builtin_profiles()[name])
    u = np.random.default_rng(8).random(1000)
    assert np.max(np.abs(abs_cdf(nf, abs_quantile(nf, u)) - u)) <= 1e-8


def test_quantile_near_one_and_plateau():
    nf = normalize(ExponentialProfile(1.0))
    q = abs_quantile(nf, 1 - 2**-53)
    assert abs_cdf(nf, q) >= 1 - 1e-15
    # profile vanishing on [0, 1): quantile of 0 sits before the mass
    plateau = normalize(TabulatedProfile([0.0, 1.0, 2.0], [0.0, 0.0, 1.0]))
    assert abs_quantile(plateau, 0.5) > 1.0
    assert abs(abs_cdf(plateau, abs_quantile(plateau, 0.5)) - 0.5) <= 1e-10


def test_quantile_rejects_out_of_range():
    nf = normalize(GaussianProfile())
    with pytest.raises(ValueError):
        abs_quantile(nf, 1.0)
    with pytest.raises(ValueError):
        abs_quantile(nf, -0.1)


def test_callable_profile_cdf_and_quantile_agree_with_gaussian():
    c = normalize(CallableProfile(lambda x: math.exp(-x * x / 2)))
    g = normalize(GaussianProfile())
    for l in (0.5, 1.0, 3.0):
        assert abs_cdf(c, l) == pytest.approx(abs_cdf(g, l), abs=1e-10)
    assert abs_quantile(c, 0.3) == pytest.approx(abs_quantile(g, 0.3), abs=1e-9)


def test_tabulated_exact_integration():
    t = TabulatedProfile([0.0, 1.0, 3.0], [2.0, 1.0, 0.0])
    # f = 2 - l on [0,1], (3 - l)/2 on [1,3]
    exact = (2 / 4 - 1 / 5) + (3 * (81 - 1) / 4 - (243 - 1) / 5) / 2
    assert third_moment(t) == pytest.approx(exact, rel=1e-14)
    assert t(0.5) == pytest.approx(1.5)
    assert t(3.5) == 0.0


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedProfile([0.0], [1.0])
    with pytest.raises(ValueError):
        TabulatedProfile([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(ValueError):
        TabulatedProfile([1.0, 0.5], [1.0, 1.0])


# -- file format -----------------------------------------------------------------


def test_load_tabulated(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("l,f\n0,1\n1,0.5\n\n2,0\n")
    t = load_tabulated(p)
    np.testing.assert_array_equal(t.grid, [0, 1, 2])
    np.testing.assert_array_equal(t.values, [1, 0.5, 0])
    p.write_text("0,1\n1,0.5\n")
    assert load_tabulated(p).grid.size == 2


@pytest.mark.parametrize(
    "text, line",
    [
        ("l,f\n0,1\n1,x\n", 3),
        ("l,f\n0,1\n1,-2\n", 3),
        ("0,1\n2,1\n1,1\n", 3),
        ("l,f\n0,1,3\n", 2),
        ("l,f\n-1,1\n0,1\n", 2),
        ("l,f\n0,1\n", None),
    ],
)
def test_load_tabulated_errors(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ProfileFormatError) as err:
        load_tabulated(p)
    assert err.value.line == line
    if line is not None:
        assert f"line {line}" in str(err.value)


def test_parse_profile(tmp_path):
    assert parse_profile("gaussian") == GaussianProfile()
    assert parse_profile("exponential:2") == ExponentialProfile(2.0)
    assert parse_profile("ball:1.5") == BallUniformProfile(1.5)
    p = tmp_path / "t.csv"
    p.write_text("0,1\n1,1\n")
    assert isinstance(parse_profile(f"tabulated:{p}"), TabulatedProfile)
    for bad in ("nope", "ball:x", "exponential:-1"):
        with pytest.raises(ValueError):
            parse_profile(bad)


def test_random_tabulated_helper_is_stable():
    assert random_tabulated() == random_tabulated()
