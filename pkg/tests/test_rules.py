import numpy as np
import pytest

from sdkl import densities as de
from sdkl import rules as ru
from sdkl.errors import DomainError
from sdkl.quadrature import QuadSpec

SPEC = QuadSpec()
LOC = de.gaussian_location()


def test_sd_delta_example():
    rule = ru.score_driven(LOC, alpha=0.1)
    branches = ru.delta(rule, 1.0, 0.0)
    assert branches == [(1.0, pytest.approx(0.1))]


def test_downscaled_delta_example():
    rule = ru.downscaled(ru.score_driven(LOC, alpha=1.0), kappa=0.25)
    assert ru.delta(rule, 1.0, 0.0) == [(1.0, pytest.approx(0.25))]


def test_lazy_branches():
    rule = ru.lazy(ru.score_driven(LOC, alpha=0.1), freeze_prob=0.5)
    branches = ru.delta(rule, 1.0, 0.0)
    assert len(branches) == 2
    assert branches[0] == (pytest.approx(0.5), pytest.approx(0.1))
    assert branches[1] == (pytest.approx(0.5), pytest.approx(0.0))


@pytest.mark.parametrize("rule", [
    ru.score_driven(LOC, 0.1),
    ru.score_driven(LOC, 0.1, scale=3.0),
    ru.anti_score(LOC, 0.2),
    ru.quasi_score_driven(de.gaussian_scale(), 0.1,
                          tilde=de.student_t_scale(5.0)),
    ru.downscaled(ru.lazy(ru.score_driven(LOC, 0.1), 0.3), 0.5),
])
def test_branch_weights_sum_to_one(rule):
    theta = 1.0 if rule.kind == ru.QSD else 0.0
    branches = ru.delta(rule, 0.7, theta)
    assert sum(w for w, _ in branches) == pytest.approx(1.0)


def test_downscaling_is_exact_branchwise():
    base = ru.lazy(ru.score_driven(LOC, 0.4), 0.25)
    down = ru.downscaled(base, 0.125)
    ys = np.linspace(-2, 2, 9)
    for (wb, db), (wd, dd) in zip(ru.branch_deltas(base, ys, 0.3),
                                  ru.branch_deltas(down, ys, 0.3)):
        assert wb == pytest.approx(wd)
        assert np.allclose(dd, 0.125 * db)


def test_is_score_equivalent_at():
    sd = ru.score_driven(LOC, 0.1, scale=7.0)
    assert ru.is_score_equivalent_at(sd, 1.0, 0.0) is ru.TriState.YES
    assert ru.is_score_equivalent_at(sd, -2.0, 0.0) is ru.TriState.YES
    assert ru.is_score_equivalent_at(sd, 0.0, 0.0) is ru.TriState.ZERO
    anti = ru.anti_score(LOC, 0.1)
    assert ru.is_score_equivalent_at(anti, 1.0, 0.0) is ru.TriState.NO


def test_step_rejects_mixtures():
    rule = ru.lazy(ru.score_driven(LOC, 0.1), 0.5)
    with pytest.raises(DomainError):
        ru.step(rule, 1.0, 0.0)
    assert not ru.is_deterministic(rule)
    assert ru.is_deterministic(ru.downscaled(ru.score_driven(LOC, 0.1), 0.5))


def test_moments_closed_forms():
    sd = ru.score_driven(LOC, 0.1)
    ms = ru.moments(sd, 0.0, LOC, 1.0, SPEC)
    assert ms.e_score == pytest.approx(1.0, abs=1e-9)
    assert ms.var_score == pytest.approx(1.0, abs=1e-8)
    assert ms.e_delta == pytest.approx(0.1, abs=1e-10)

    matched = ru.moments(sd, 1.0, LOC, 1.0, SPEC)
    assert abs(matched.e_score) < 1e-10

    lz = ru.lazy(sd, 0.5)
    assert ru.moments(lz, 0.0, LOC, 1.0, SPEC).e_delta == pytest.approx(
        0.05, abs=1e-10)


def test_downscaled_moment_scaling():
    base = ru.score_driven(LOC, 0.3)
    m1 = ru.moments(base, 0.0, LOC, 1.5, SPEC)
    mk = ru.moments(ru.downscaled(base, 0.25), 0.0, LOC, 1.5, SPEC)
    assert mk.e_delta == pytest.approx(0.25 * m1.e_delta, rel=1e-9)
    assert mk.e_delta_sq == pytest.approx(0.0625 * m1.e_delta_sq, rel=1e-9)


def test_lazy_expectation_equivalence_tracks_base():
    sd = ru.score_driven(LOC, 0.1)
    for rule in (sd, ru.lazy(sd, 0.9)):
        assert ru.is_score_equivalent_in_expectation(
            rule, 0.0, LOC, 1.0, SPEC) is ru.TriState.YES
    assert ru.is_score_equivalent_in_expectation(
        ru.anti_score(LOC, 0.1), 0.0, LOC, 1.0, SPEC) is ru.TriState.NO
    assert ru.is_score_equivalent_in_expectation(
        sd, 1.0, LOC, 1.0, SPEC) is ru.TriState.ZERO


def test_predict():
    assert ru.predict(0.3, 0.0, 1.0) == pytest.approx(0.3)
    assert ru.predict(1.0, 0.1, 0.9) == pytest.approx(1.0)
    assert ru.predict(2.0, 0.0, 0.5) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        ru.predict(1.0, 0.1, 1.0)


def test_rule_validation():
    with pytest.raises(DomainError):
        ru.score_driven(LOC, alpha=-0.1)
    with pytest.raises(DomainError):
        ru.score_driven(LOC, alpha=0.1, scale=0.0)
    with pytest.raises(DomainError):
        ru.lazy(ru.score_driven(LOC, 0.1), 1.0)
    with pytest.raises(DomainError):
        ru.downscaled(ru.score_driven(LOC, 0.1), 0.0)
