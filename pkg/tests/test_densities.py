import math

import numpy as np
import pytest

from sdkl import densities as de
from sdkl.errors import DomainError
from sdkl.quadrature import QuadSpec, integrate

SPEC = QuadSpec()

FAMILIES = {
    "gaussian_location": (de.gaussian_location(), (-4.0, 4.0), (-6.0, 6.0)),
    "gaussian_location_s2": (de.gaussian_location(2.0), (-4.0, 4.0),
                             (-8.0, 8.0)),
    "gaussian_scale": (de.gaussian_scale(), (0.25, 4.0), (-6.0, 6.0)),
    "student_t_scale": (de.student_t_scale(5.0), (0.25, 4.0), (-6.0, 6.0)),
    "gaussian_mixture2": (de.gaussian_mixture2(), (-3.0, 3.0), (-6.0, 6.0)),
    "piecewise_test": (de.piecewise_test(), (-2.0, 2.0), (-3.0, 3.0)),
}


def _random_points(theta_box, y_box, n, seed):
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(*theta_box, size=n)
    ys = rng.uniform(*y_box, size=n)
    return thetas, ys


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_score_matches_finite_difference(name):
    d, theta_box, y_box = FAMILIES[name]
    thetas, ys = _random_points(theta_box, y_box, 100, seed=hash(name) % 2**31)
    h = 1e-6
    for th, y in zip(thetas, ys):
        fd = (float(de.log_pdf(d, y, th + h))
              - float(de.log_pdf(d, y, th - h))) / (2 * h)
        s = float(de.score(d, y, th))
        assert abs(s - fd) / (1 + abs(s)) < 1e-6, (name, y, th)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_hessian_matches_finite_difference(name):
    d, theta_box, y_box = FAMILIES[name]
    thetas, ys = _random_points(theta_box, y_box, 100,
                                seed=(hash(name) + 1) % 2**31)
    h = 1e-5
    for th, y in zip(thetas, ys):
        fd = (float(de.score(d, y, th + h))
              - float(de.score(d, y, th - h))) / (2 * h)
        hess = float(de.log_pdf_hess(d, y, th))
        assert abs(hess - fd) / (1 + abs(hess)) < 1e-5, (name, y, th)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_normalization(name):
    d, theta_box, _ = FAMILIES[name]
    rng = np.random.default_rng(7)
    for th in rng.uniform(*theta_box, size=20):
        lo, hi = de.truncation_bounds(d, float(th), 1e-12)
        res = integrate(lambda x: de.pdf(d, x, float(th)), lo, hi, SPEC)
        assert 1 - 1e-8 <= res.value <= 1 + 1e-8, (name, th)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_positivity_on_truncated_domain(name):
    d, theta_box, _ = FAMILIES[name]
    for th in np.linspace(*theta_box, 7):
        lo, hi = de.truncation_bounds(d, float(th), 1e-12)
        xs = np.linspace(lo, hi, 501)
        assert np.all(de.pdf(d, xs, float(th)) > 0.0)


def test_location_equivariance():
    d = de.gaussian_location()
    ys = np.linspace(-3, 3, 41)
    for c in (-2.0, 0.7, 5.0):
        assert np.allclose(de.pdf(d, ys, 0.3), de.pdf(d, ys + c, 0.3 + c))


def test_cdf_ppf_roundtrip():
    for d, th in [(de.gaussian_location(), 0.5), (de.gaussian_scale(), 1.7),
                  (de.student_t_scale(5.0), 1.2), (de.gaussian_mixture2(), 0.4),
                  (de.piecewise_test(), 0.8)]:
        for q in (0.01, 0.2, 0.5, 0.9, 0.999):
            y = float(de.ppf(d, q, th))
            assert float(de.cdf(d, y, th)) == pytest.approx(q, abs=1e-9)


def test_evaluate_bundle_and_domain_errors():
    d = de.gaussian_location()
    b = de.evaluate(d, 1.0, 0.0)
    assert b.pdf_value == pytest.approx(0.24197072451914337, rel=1e-12)
    assert b.score == pytest.approx(1.0)
    assert b.hessian == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        de.evaluate(de.gaussian_scale(), 1.0, -1.0)
    with pytest.raises(DomainError):
        de.evaluate(de.piecewise_test(), 5.0, 0.0)


def test_mass_on():
    d = de.gaussian_location()
    assert de.mass_on(d, (0.8, 1.2), 0.0) == pytest.approx(
        0.09678572836168842, rel=1e-12)
    assert de.mass_on(d, (-50.0, 50.0), 0.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        de.mass_on(d, (1.0, 0.0), 0.0)
    # clipping to the bounded support
    pw = de.piecewise_test()
    assert de.mass_on(pw, (-100.0, 100.0), 0.0) == pytest.approx(1.0)


def test_truncation_bounds():
    d = de.gaussian_location()
    lo, hi = de.truncation_bounds(d, 0.0, 1e-12)
    assert -7.3 < lo < -6.9 and 6.9 < hi < 7.3
    # upper quantile carries the usual 1-ulp-of-(1-q) wobble
    assert hi == pytest.approx(-lo, abs=1e-4)
    # total mass outside stays at the budget's order
    assert 1.0 - de.mass_on(d, (lo, hi), 0.0) <= 2e-12
    lo5, hi5 = de.truncation_bounds(d, 5.0, 1e-12)
    assert lo5 == pytest.approx(lo + 5.0) and hi5 == pytest.approx(hi + 5.0)
    # heavy tails: the t interval contains the Gaussian one at equal variance
    g = de.truncation_bounds(de.gaussian_scale(), 1.0, 1e-8)
    t = de.truncation_bounds(de.student_t_scale(5.0), 1.0, 1e-8)
    assert t[0] < g[0] and t[1] > g[1]
    assert t[0] == pytest.approx(-t[1])
    with pytest.raises(DomainError):
        de.truncation_bounds(d, 0.0, 0.5)


def test_hessian_bound():
    d1 = de.gaussian_location()
    assert de.hessian_bound(d1, (-3, 3), (-5, 5)) == pytest.approx(1.0)
    d2 = de.gaussian_location(2.0)
    assert de.hessian_bound(d2, (-3, 3), (-5, 5)) == pytest.approx(0.25)
    ds = de.gaussian_scale()
    narrow = de.hessian_bound(ds, (0.5, 2.0), (-4, 4))
    wide = de.hessian_bound(ds, (0.5, 2.0), (-8, 8))
    assert math.isfinite(narrow) and narrow > 0
    assert wide >= narrow
    with pytest.raises(DomainError):
        de.hessian_bound(d1, (-1, 1), (-1, 1), grid_n=10)


def test_make_density_registry():
    assert de.make_density("gaussian_location", sigma=2.0).sigma == 2.0
    assert de.make_density("student_t_scale", nu=7.0).nu == 7.0
    with pytest.raises(DomainError):
        de.make_density("weibull")
    with pytest.raises(DomainError):
        de.student_t_scale(2.0)


def test_sampling_moments():
    rng = np.random.default_rng(11)
    for d, th, mean, var in [
            (de.gaussian_location(), 0.7, 0.7, 1.0),
            (de.gaussian_scale(), 1.5, 0.0, 1.5),
            (de.student_t_scale(5.0), 1.5, 0.0, 1.5),
            (de.gaussian_mixture2(), 0.0, 0.0, 2.0)]:
        x = de.sample(d, th, 200_000, rng)
        assert np.mean(x) == pytest.approx(mean, abs=0.02)
        assert np.var(x) == pytest.approx(var, abs=0.05)


def test_piecewise_window_is_theta_free():
    d = de.piecewise_test()
    xs = np.linspace(-1.0, 1.0, 201)
    assert np.allclose(de.pdf(d, xs, -0.8), 0.25)
    assert np.allclose(de.pdf(d, xs, 1.3), 0.25)
    # complements of any window-contained ball carry equal mass across theta
    for a, b in [(-0.5, 0.5), (-1.0, 0.2)]:
        m1 = de.mass_on(d, (a, b), -0.8)
        m2 = de.mass_on(d, (a, b), 1.3)
        assert m1 == pytest.approx(m2, abs=1e-15)
