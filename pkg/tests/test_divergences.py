import math

import numpy as np
import pytest

from sdkl import densities as de
from sdkl import divergences as dv
from sdkl import rules as ru
from sdkl.errors import DegenerateLocalization, DegenerateScenario, DomainError
from sdkl.quadrature import QuadSpec

from oracles import delta_ekl_sd, ekl_sd, kl_gauss_loc

SPEC = QuadSpec()
LOC = de.gaussian_location()


def test_kl_closed_form_examples():
    assert dv.kl(LOC, 1.0, LOC, 0.0, SPEC).value == pytest.approx(0.5)
    assert dv.kl(LOC, 0.0, LOC, 0.1, SPEC).value == pytest.approx(0.005)
    assert dv.kl(LOC, 0.3, LOC, 0.3, SPEC).value == 0.0
    assert dv.kl(LOC, 1.0, LOC, 0.0, SPEC).method == dv.CLOSED_FORM


def test_kl_quadrature_cross_check():
    # force the quadrature path with a scale-family truth
    g = de.gaussian_scale()
    rep = dv.kl(g, 1.0, g, 2.0, SPEC)
    exact = 0.5 * (1.0 / 2.0 - 1.0 + math.log(2.0))  # variance ratio formula
    assert rep.method == dv.QUADRATURE
    assert rep.value == pytest.approx(exact, rel=1e-8)
    same = dv.kl(g, 1.3, g, 1.3, SPEC)
    assert abs(same.raw_value) <= SPEC.abs_tol
    assert same.value >= 0.0


def test_tkl_examples():
    ball = dv.Ball(1.0, 0.1)
    assert abs(dv.tkl(LOC, 0.0, LOC, 0.0, ball, SPEC).value) < 1e-12
    neg = dv.tkl(LOC, 0.0, LOC, 0.1, ball, SPEC)
    assert neg.value < 0.0  # f nearer the ball than p: not a divergence
    wide = dv.tkl(LOC, 0.7, LOC, 0.0, dv.Ball(0.0, 40.0), SPEC)
    assert wide.value == pytest.approx(kl_gauss_loc(0.7), rel=1e-8)


def test_tkl_strictly_negative_instance():
    rep = dv.tkl(LOC, 0.0, LOC, 1.0, dv.Ball(1.0, 0.5), SPEC)
    assert rep.value < -1e-3


def test_ckl_examples():
    ball = dv.Ball(1.0, 0.05)
    assert abs(dv.ckl(LOC, 0.0, LOC, 0.0, ball, SPEC).value) <= 1e-12
    pos = dv.ckl(LOC, 1.5, LOC, 0.0, ball, SPEC)
    assert pos.value > 0.0
    with pytest.raises(DegenerateLocalization):
        dv.ckl(de.piecewise_test(), 0.0, de.piecewise_test(), 0.0,
               dv.Ball(0.0, 10.0), SPEC)


def test_ckl_localization_invariance():
    # two parameters of the piecewise family agree on any ball inside the
    # central window and assign equal mass to its complement, so the
    # censored divergence cannot distinguish them
    pw = de.piecewise_test()
    truth = de.gaussian_mixture2(means=(-0.3, 0.6), sds=(0.8, 0.5))
    ball = dv.Ball(0.2, 0.5)
    a = dv.ckl(truth, 0.0, pw, -0.8, ball, SPEC)
    b = dv.ckl(truth, 0.0, pw, 1.3, ball, SPEC)
    assert a.value == pytest.approx(b.value, abs=1e-8)


def test_localized_deltas_matched_truth_pathology():
    rule = ru.score_driven(LOC, 0.1)
    loc = dv.localized_deltas(rule, 1.0, 0.0, LOC, 0.0, 0.2, SPEC)
    assert -0.02 < loc.delta_tkl < -0.004
    # while the global divergence strictly increases
    d_kl = (dv.kl(LOC, 0.0, LOC, 0.1, SPEC).value
            - dv.kl(LOC, 0.0, LOC, 0.0, SPEC).value)
    assert d_kl == pytest.approx(0.005)


def test_localized_deltas_zero_step():
    rule = ru.score_driven(LOC, 0.1)
    loc = dv.localized_deltas(rule, 0.0, 0.0, LOC, 1.0, 0.2, SPEC)
    assert loc.delta_tkl == 0.0 and loc.delta_ckl == 0.0


def test_localized_deltas_small_step_direction():
    rule = ru.score_driven(LOC, 1e-3)
    loc = dv.localized_deltas(rule, 1.0, 0.0, LOC, 1.5, 1e-6, SPEC)
    assert loc.delta_ckl < 0.0
    assert abs(loc.delta_ckl) > 10 * loc.err_ckl


def test_localized_deltas_domain_guard():
    scale = de.gaussian_scale(theta_domain=(0.25, 4.0))
    rule = ru.score_driven(scale, alpha=10.0)
    with pytest.raises(DomainError):
        dv.localized_deltas(rule, 4.0, 0.3, scale, 1.0, 0.1, SPEC)


@pytest.mark.parametrize("m,alpha", [(1.0, 0.5), (0.0, 0.1), (2.0, 0.05)])
def test_ekl_closed_form(m, alpha):
    rule = ru.score_driven(LOC, alpha)
    rep = dv.ekl(LOC, m, rule, 0.0, SPEC)
    assert rep.value == pytest.approx(ekl_sd(m, alpha), rel=1e-7, abs=1e-9)
    assert dv.delta_ekl(LOC, m, rule, 0.0, SPEC) == pytest.approx(
        delta_ekl_sd(m, alpha), rel=1e-7, abs=1e-9)


def test_ekl_tiny_step_approaches_baseline():
    rule = ru.downscaled(ru.score_driven(LOC, 0.1), 1e-8)
    rep = dv.ekl(LOC, 1.0, rule, 0.0, SPEC)
    assert rep.value == pytest.approx(0.5, abs=1e-8)


def test_delta_ekl_mc_agrees_with_nested():
    spec = QuadSpec(seed=123)
    rule = ru.score_driven(LOC, 0.3)
    nested = dv.delta_ekl_report(LOC, 1.0, rule, 0.0, spec)
    mc = dv.delta_ekl_report(LOC, 1.0, rule, 0.0, spec, method="mc")
    assert mc.method == dv.MONTE_CARLO and mc.seed_used == 123
    assert abs(mc.value - nested.value) < 4 * mc.err_estimate
    # the seed makes it reproducible
    mc2 = dv.delta_ekl_report(LOC, 1.0, rule, 0.0, spec, method="mc")
    assert mc2.value == mc.value


def test_delta_ekl_mixture_rule_averages_branches():
    sd = ru.score_driven(LOC, 0.2)
    lz = ru.lazy(sd, 0.5)
    d_sd = dv.delta_ekl(LOC, 1.0, sd, 0.0, SPEC)
    d_lz = dv.delta_ekl(LOC, 1.0, lz, 0.0, SPEC)
    assert d_lz == pytest.approx(0.5 * d_sd, rel=1e-6)


def test_scoring_rules():
    ball = dv.Ball(0.0, 1.0)
    out = dv.scoring_rules(LOC, 0.0, 3.0, ball)
    assert out["wl"] == 0.0
    assert out["cl"] == pytest.approx(-1.147874464449318, rel=1e-10)
    inside = dv.scoring_rules(LOC, 0.0, 0.5, ball)
    expected = float(de.log_pdf(LOC, 0.5, 0.0))
    assert inside["wl"] == pytest.approx(expected)
    assert inside["cl"] == pytest.approx(expected)


def test_learning_rate_bounds():
    b1 = dv.learning_rate_bounds(LOC, 1.0, LOC, 0.0, 1.0, SPEC)
    assert b1["alpha_bar_ekl"] == pytest.approx(1.0, abs=1e-8)
    assert b1["alpha_bar_cev"] == 2.0
    b2 = dv.learning_rate_bounds(LOC, 2.0, LOC, 0.0, 1.0, SPEC)
    assert b2["alpha_bar_ekl"] == pytest.approx(1.6, abs=1e-8)
    assert b2["alpha_bar_ekl"] <= b2["alpha_bar_cev"]
    with pytest.raises(DegenerateScenario):
        dv.learning_rate_bounds(LOC, 0.0, LOC, 0.0, 1.0, SPEC)


def test_ball_validation():
    with pytest.raises(DomainError):
        dv.Ball(0.0, -0.1)
    with pytest.raises(DomainError):
        dv.Ball(10.0, 0.5).interval((-3.0, 3.0))


def test_kl_ckl_nonnegative_random_pairs():
    rng = np.random.default_rng(5)
    fams = [de.gaussian_location(), de.gaussian_scale(),
            de.student_t_scale(5.0), de.gaussian_mixture2()]
    for _ in range(60):
        p = fams[rng.integers(len(fams))]
        f = fams[rng.integers(len(fams))]
        lam = float(rng.uniform(0.5, 2.0))
        th = float(rng.uniform(0.5, 2.0))
        assert dv.kl(p, lam, f, th, SPEC).value >= -1e-8
        center = float(rng.uniform(-1.0, 1.0))
        ball = dv.Ball(center, float(rng.uniform(0.1, 1.0)))
        assert dv.ckl(p, lam, f, th, ball, SPEC).value >= -1e-8
