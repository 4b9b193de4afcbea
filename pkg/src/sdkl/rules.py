"""Updating rules and their score-equivalence diagnostics.

A rule maps (observation, predicted parameter) to an updated parameter.
Randomized rules are represented as finite mixtures of deterministic
branches with weights summing to one, so expectations aggregate branches
analytically instead of by simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from . import densities
from .densities import ParamDensity
from .errors import DegenerateScenario, DomainError
from .quadrature import QuadSpec, integrate

#: sign-resolution tolerance for products of moments
EPS_SIGN = 1e-9

SD = "sd"
SCALED_SD = "scaled_sd"
DOWNSCALED = "downscaled"
QSD = "qsd"
ANTI = "anti"
LAZY = "lazy"


class TriState(str, Enum):
    YES = "yes"
    NO = "no"
    ZERO = "zero"


@dataclass(frozen=True)
class UpdateRule:
    kind: str
    model: ParamDensity
    alpha: float = 0.0
    scale: float = 1.0
    kappa: float = 1.0
    base: Optional["UpdateRule"] = None
    tilde: Optional[ParamDensity] = None
    freeze_prob: float = 0.0

    def __post_init__(self):
        if self.kind in (SD, SCALED_SD, QSD, ANTI) and self.alpha <= 0:
            raise DomainError("learning rate alpha must be positive")
        if self.kind == SCALED_SD and self.scale <= 0:
            raise DomainError("scaling constant must be positive")
        if self.kind == DOWNSCALED:
            if self.kappa <= 0:
                raise DomainError("downscaling kappa must be positive")
            if self.base is None:
                raise DomainError("downscaled rule needs a base rule")
        if self.kind == LAZY:
            if not 0.0 <= self.freeze_prob < 1.0:
                raise DomainError("freeze probability must lie in [0, 1)")
            if self.base is None:
                raise DomainError("lazy rule needs a base rule")
        if self.kind == QSD and self.tilde is None:
            raise DomainError("quasi rule needs the auxiliary density")


def score_driven(model: ParamDensity, alpha: float,
                 scale: float = 1.0) -> UpdateRule:
    kind = SD if scale == 1.0 else SCALED_SD
    return UpdateRule(kind, model, alpha=alpha, scale=scale)


def downscaled(base: UpdateRule, kappa: float) -> UpdateRule:
    return UpdateRule(DOWNSCALED, base.model, kappa=kappa, base=base)


def quasi_score_driven(model: ParamDensity, alpha: float,
                       tilde: ParamDensity) -> UpdateRule:
    return UpdateRule(QSD, model, alpha=alpha, tilde=tilde)


def anti_score(model: ParamDensity, alpha: float) -> UpdateRule:
    """Sign-flipped gradient step; a deliberately bad rule used to exercise
    the converse direction of the expectation checks."""
    return UpdateRule(ANTI, model, alpha=alpha)


def lazy(base: UpdateRule, freeze_prob: float) -> UpdateRule:
    return UpdateRule(LAZY, base.model, base=base, freeze_prob=freeze_prob)


@dataclass(frozen=True)
class MomentSummary:
    e_delta: float
    e_delta_sq: float
    e_score: float
    var_score: float

    def __post_init__(self):
        if self.e_delta_sq < self.e_delta ** 2 - 1e-12:
            raise DegenerateScenario("inconsistent moments: E[d^2] < (E d)^2")


def branch_deltas(rule: UpdateRule, y, theta: float) -> List[Tuple[float, np.ndarray]]:
    """Weighted list of (weight, parameter step) branches at (y, theta).

    y may be an ndarray; each branch step is then an array of the same
    shape.  Deterministic rules return a single branch of weight 1.
    """
    y = np.asarray(y, dtype=float)
    if rule.kind in (SD, SCALED_SD):
        return [(1.0, rule.alpha * rule.scale
                 * densities.score(rule.model, y, theta))]
    if rule.kind == ANTI:
        return [(1.0, -rule.alpha * densities.score(rule.model, y, theta))]
    if rule.kind == QSD:
        return [(1.0, rule.alpha * densities.score(rule.tilde, y, theta))]
    if rule.kind == DOWNSCALED:
        return [(w, rule.kappa * d) for w, d in
                branch_deltas(rule.base, y, theta)]
    if rule.kind == LAZY:
        q = rule.freeze_prob
        out = [((1.0 - q) * w, d) for w, d in
               branch_deltas(rule.base, y, theta)]
        out.append((q, np.zeros_like(y)))
        return out
    raise DomainError(rule.kind)


def delta(rule: UpdateRule, y: float, theta: float) -> List[Tuple[float, float]]:
    """Branches of the parameter step at a single observation."""
    return [(w, float(d)) for w, d in branch_deltas(rule, y, theta)]


def is_deterministic(rule: UpdateRule) -> bool:
    if rule.kind == LAZY:
        return False
    if rule.kind == DOWNSCALED:
        return is_deterministic(rule.base)
    return True


def step(rule: UpdateRule, y, theta: float):
    """Parameter step of a deterministic rule (single branch)."""
    branches = branch_deltas(rule, y, theta)
    if len(branches) != 1:
        raise DomainError("rule has multiple branches; treat them separately")
    return branches[0][1]


def apply_update(rule: UpdateRule, y: float, theta: float) -> float:
    return theta + float(step(rule, y, theta))


def is_score_equivalent_at(rule: UpdateRule, y: float,
                           theta: float) -> TriState:
    """Does the (deterministic) step share the sign of the model score?"""
    d = float(step(rule, y, theta))
    grad = float(densities.score(rule.model, y, theta))
    sd, sg = np.sign(d), np.sign(grad)
    if sd == 0.0 and sg == 0.0:
        return TriState.ZERO
    return TriState.YES if sd == sg else TriState.NO


def moments(rule: UpdateRule, theta: float, truth: ParamDensity,
            lam: float, quad: QuadSpec) -> MomentSummary:
    """First two moments of the step and of the model score, under the truth.

    Mixture rules aggregate branchwise; all four integrals share one set of
    quadrature panels.
    """
    lo, hi = densities.truncation_bounds(truth, lam, quad.tail_mass)

    def integrand(y):
        p = densities.pdf(truth, y, lam)
        g = densities.score(rule.model, y, theta)
        e_d = np.zeros_like(y)
        e_d2 = np.zeros_like(y)
        for w, d in branch_deltas(rule, y, theta):
            e_d = e_d + w * d
            e_d2 = e_d2 + w * d * d
        return np.stack([e_d * p, e_d2 * p, g * p, g * g * p], axis=-1)

    res = integrate(integrand, lo, hi, quad)
    e_d, e_d2, e_g, e_g2 = (float(v) for v in res.value)
    return MomentSummary(e_delta=e_d, e_delta_sq=e_d2, e_score=e_g,
                         var_score=max(e_g2 - e_g ** 2, 0.0))


def is_score_equivalent_in_expectation(rule: UpdateRule, theta: float,
                                       truth: ParamDensity, lam: float,
                                       quad: QuadSpec) -> TriState:
    """Sign of E[step] * E[score] under the truth, with EPS_SIGN resolution."""
    ms = moments(rule, theta, truth, lam, quad)
    product = ms.e_delta * ms.e_score
    if product > EPS_SIGN:
        return TriState.YES
    if product < -EPS_SIGN:
        return TriState.NO
    return TriState.ZERO


def predict(theta_upd: float, omega: float, beta: float) -> float:
    """Prediction step: a linear (possibly identity) map of the update."""
    if not (abs(beta) < 1.0 or (omega == 0.0 and beta == 1.0)):
        raise DomainError("need |beta| < 1, or omega=0 with beta=1")
    return omega + beta * theta_upd
