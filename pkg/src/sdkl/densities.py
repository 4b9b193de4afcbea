"""Parametric density families with a scalar time-varying parameter.

Each family exposes the density, log-density, its first and second
derivatives in the time-varying parameter, the cumulative distribution and
its inverse, plus sampling.  Derivatives are coded analytically per family;
finite differences are used only by the test suite as an oracle.

Families (config ids):
  gaussian_location  N(theta, sigma^2), sigma fixed
  gaussian_scale     N(0, theta), theta the variance
  student_t_scale    Student-t, nu dof, scaled so the variance equals theta
  gaussian_mixture2  two-component Gaussian mixture shifted by theta
  piecewise_test     bounded piecewise density; theta shuffles mass between
                     the two outer shelves while the central window is fixed
                     (exists to exercise the localization property of
                     censoring: two parameter values that agree on the
                     window also agree in aggregate off the window)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import DomainError
from .quadrature import QuadSpec

GAUSSIAN_LOCATION = "gaussian_location"
GAUSSIAN_SCALE = "gaussian_scale"
STUDENT_T_SCALE = "student_t_scale"
GAUSSIAN_MIXTURE2 = "gaussian_mixture2"
PIECEWISE_TEST = "piecewise_test"

_INF = float("inf")

# piecewise_test geometry: support [-3, 3], flat central window [-1, 1]
_PW_LO, _PW_HI = -3.0, 3.0
_PW_WIN = 1.0
_PW_LEVEL = 0.25  # density inside the window; window mass = 0.5


@dataclass(frozen=True)
class ParamDensity:
    """A density family f(y | theta) with fixed shape parameters."""

    family: str
    sigma: float = 1.0
    nu: float = 5.0
    weights: Tuple[float, float] = (0.5, 0.5)
    means: Tuple[float, float] = (-1.0, 1.0)
    sds: Tuple[float, float] = (1.0, 1.0)
    theta_domain: Tuple[float, float] = (-_INF, _INF)
    outcome_domain: Tuple[float, float] = (-_INF, _INF)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown density family {self.family!r}")
        if self.family == STUDENT_T_SCALE and self.nu <= 2:
            raise DomainError("student_t_scale needs nu > 2 for the "
                              "variance parametrization")
        if self.family in (GAUSSIAN_SCALE, STUDENT_T_SCALE):
            lo, hi = self.theta_domain
            if lo <= 0:
                object.__setattr__(self, "theta_domain", (1e-8, hi))
        if self.family == PIECEWISE_TEST:
            object.__setattr__(self, "outcome_domain", (_PW_LO, _PW_HI))
        if self.family == GAUSSIAN_MIXTURE2:
            if abs(sum(self.weights) - 1.0) > 1e-12:
                raise DomainError("mixture weights must sum to 1")
            if min(self.weights) <= 0 or min(self.sds) <= 0:
                raise DomainError("mixture weights and sds must be positive")


@dataclass(frozen=True)
class EvalBundle:
    pdf_value: float
    log_pdf: float
    score: float
    hessian: float


def gaussian_location(sigma: float = 1.0) -> ParamDensity:
    return ParamDensity(GAUSSIAN_LOCATION, sigma=sigma)


def gaussian_scale(theta_domain: Tuple[float, float] = (1e-8, 1e8)) -> ParamDensity:
    return ParamDensity(GAUSSIAN_SCALE, theta_domain=theta_domain)


def student_t_scale(nu: float,
                    theta_domain: Tuple[float, float] = (1e-8, 1e8)) -> ParamDensity:
    return ParamDensity(STUDENT_T_SCALE, nu=nu, theta_domain=theta_domain)


def gaussian_mixture2(weights=(0.5, 0.5), means=(-1.0, 1.0),
                      sds=(1.0, 1.0)) -> ParamDensity:
    return ParamDensity(GAUSSIAN_MIXTURE2, weights=tuple(weights),
                        means=tuple(means), sds=tuple(sds))


def piecewise_test() -> ParamDensity:
    return ParamDensity(PIECEWISE_TEST)


def make_density(family_id: str, **shape) -> ParamDensity:
    """Build a family from its config id and shape parameters."""
    builders = {
        GAUSSIAN_LOCATION: gaussian_location,
        GAUSSIAN_SCALE: gaussian_scale,
        STUDENT_T_SCALE: student_t_scale,
        GAUSSIAN_MIXTURE2: gaussian_mixture2,
        PIECEWISE_TEST: piecewise_test,
    }
    if family_id not in builders:
        raise DomainError(f"unknown density family {family_id!r}")
    shape = dict(shape)
    if "theta_domain" in shape:
        shape["theta_domain"] = tuple(shape["theta_domain"])
    return builders[family_id](**shape)


def _check_theta(d: ParamDensity, theta: float) -> None:
    lo, hi = d.theta_domain
    if not lo < theta < hi:
        raise DomainError(
            f"theta={theta} outside the interior of {d.theta_domain} "
            f"for {d.family}")


def _check_y(d: ParamDensity, y: float) -> None:
    lo, hi = d.outcome_domain
    if not lo <= y <= hi:
        raise DomainError(f"y={y} outside outcome domain {d.outcome_domain}")


# ---------------------------------------------------------------------------
# vectorized primitives (y may be an ndarray)
# ---------------------------------------------------------------------------

def _pw_shelf_masses(theta):
    t = np.tanh(theta)
    return 0.25 + 0.1 * t, 0.25 - 0.1 * t  # left, right; sum = 0.5


def log_pdf(d: ParamDensity, y, theta: float):
    y = np.asarray(y, dtype=float)
    if d.family == GAUSSIAN_LOCATION:
        s2 = d.sigma ** 2
        return -0.5 * math.log(2 * math.pi * s2) - (y - theta) ** 2 / (2 * s2)
    if d.family == GAUSSIAN_SCALE:
        # theta may itself be an ndarray broadcasting against y
        return -0.5 * np.log(2 * math.pi * theta) - y ** 2 / (2 * theta)
    if d.family == STUDENT_T_SCALE:
        nu = d.nu
        c = (math.lgamma((nu + 1) / 2) - math.lgamma(nu / 2)
             - 0.5 * np.log(math.pi * (nu - 2) * theta))
        return c - 0.5 * (nu + 1) * np.log1p(y ** 2 / ((nu - 2) * theta))
    if d.family == GAUSSIAN_MIXTURE2:
        # logsumexp keeps the far tails finite where the pdf underflows
        comp = [math.log(w) - 0.5 * ((y - m - theta) / s) ** 2
                - math.log(s * math.sqrt(2 * math.pi))
                for w, m, s in zip(d.weights, d.means, d.sds)]
        return logsumexp(np.stack(comp, axis=0), axis=0)
    if d.family == PIECEWISE_TEST:
        return np.log(pdf(d, y, theta))  # bounded below on the support
    raise DomainError(d.family)


def pdf(d: ParamDensity, y, theta: float):
    y = np.asarray(y, dtype=float)
    if d.family == GAUSSIAN_MIXTURE2:
        out = np.zeros_like(y)
        for w, m, s in zip(d.weights, d.means, d.sds):
            out = out + w * np.exp(-0.5 * ((y - m - theta) / s) ** 2) \
                / (s * math.sqrt(2 * math.pi))
        return out
    if d.family == PIECEWISE_TEST:
        m_left, m_right = _pw_shelf_masses(theta)
        shelf_w = _PW_HI - _PW_WIN  # = 2
        return np.where(np.abs(y) <= _PW_WIN, _PW_LEVEL,
                        np.where(y < -_PW_WIN, m_left / shelf_w,
                                 m_right / shelf_w))
    return np.exp(log_pdf(d, y, theta))


def score(d: ParamDensity, y, theta: float):
    """d/dtheta log f(y | theta)."""
    y = np.asarray(y, dtype=float)
    if d.family == GAUSSIAN_LOCATION:
        return (y - theta) / d.sigma ** 2
    if d.family == GAUSSIAN_SCALE:
        return (y ** 2 - theta) / (2 * theta ** 2)
    if d.family == STUDENT_T_SCALE:
        nu = d.nu
        a = (nu - 2) * theta + y ** 2
        return nu / (2 * theta) - (nu + 1) * (nu - 2) / (2 * a)
    if d.family == GAUSSIAN_MIXTURE2:
        num = np.zeros_like(y)
        den = np.zeros_like(y)
        for w, m, s in zip(d.weights, d.means, d.sds):
            comp = w * np.exp(-0.5 * ((y - m - theta) / s) ** 2) \
                / (s * math.sqrt(2 * math.pi))
            den = den + comp
            num = num + comp * (y - m - theta) / s ** 2
        return num / den
    if d.family == PIECEWISE_TEST:
        t = math.tanh(theta)
        sech2 = 1.0 - t * t
        left = 0.1 * sech2 / (0.25 + 0.1 * t)
        right = -0.1 * sech2 / (0.25 - 0.1 * t)
        return np.where(np.abs(y) <= _PW_WIN, 0.0,
                        np.where(y < -_PW_WIN, left, right))
    raise DomainError(d.family)


def log_pdf_hess(d: ParamDensity, y, theta: float):
    """d^2/dtheta^2 log f(y | theta)."""
    y = np.asarray(y, dtype=float)
    if d.family == GAUSSIAN_LOCATION:
        return np.full_like(y, -1.0 / d.sigma ** 2)
    if d.family == GAUSSIAN_SCALE:
        return 1.0 / (2 * theta ** 2) - y ** 2 / theta ** 3
    if d.family == STUDENT_T_SCALE:
        nu = d.nu
        a = (nu - 2) * theta + y ** 2
        return -nu / (2 * theta ** 2) + (nu + 1) * (nu - 2) ** 2 / (2 * a ** 2)
    if d.family == GAUSSIAN_MIXTURE2:
        num1 = np.zeros_like(y)
        num2 = np.zeros_like(y)
        den = np.zeros_like(y)
        for w, m, s in zip(d.weights, d.means, d.sds):
            comp = w * np.exp(-0.5 * ((y - m - theta) / s) ** 2) \
                / (s * math.sqrt(2 * math.pi))
            z = (y - m - theta) / s ** 2
            den = den + comp
            num1 = num1 + comp * z
            num2 = num2 + comp * (z * z - 1.0 / s ** 2)
        return num2 / den - (num1 / den) ** 2
    if d.family == PIECEWISE_TEST:
        t = math.tanh(theta)
        sech2 = 1.0 - t * t
        u, v = 0.25 + 0.1 * t, 0.25 - 0.1 * t
        du, dv = 0.1 * sech2, -0.1 * sech2
        ddu, ddv = -0.2 * t * sech2, 0.2 * t * sech2
        left = ddu / u - (du / u) ** 2
        right = ddv / v - (dv / v) ** 2
        return np.where(np.abs(y) <= _PW_WIN, 0.0,
                        np.where(y < -_PW_WIN, left, right))
    raise DomainError(d.family)


def cdf(d: ParamDensity, y, theta: float):
    y = np.asarray(y, dtype=float)
    if d.family == GAUSSIAN_LOCATION:
        return stats.norm.cdf(y, loc=theta, scale=d.sigma)
    if d.family == GAUSSIAN_SCALE:
        return stats.norm.cdf(y, scale=math.sqrt(theta))
    if d.family == STUDENT_T_SCALE:
        s = math.sqrt((d.nu - 2) * theta / d.nu)
        return stats.t.cdf(y / s, d.nu)
    if d.family == GAUSSIAN_MIXTURE2:
        out = np.zeros_like(y)
        for w, m, s in zip(d.weights, d.means, d.sds):
            out = out + w * stats.norm.cdf(y, loc=m + theta, scale=s)
        return out
    if d.family == PIECEWISE_TEST:
        m_left, m_right = _pw_shelf_masses(theta)
        yc = np.clip(y, _PW_LO, _PW_HI)
        left_part = m_left * np.clip((yc - _PW_LO) / 2.0, 0.0, 1.0)
        win_part = _PW_LEVEL * np.clip(yc + _PW_WIN, 0.0, 2 * _PW_WIN)
        right_part = m_right * np.clip((yc - _PW_WIN) / 2.0, 0.0, 1.0)
        return left_part + win_part + right_part
    raise DomainError(d.family)


def ppf(d: ParamDensity, q, theta: float):
    q = np.asarray(q, dtype=float)
    if d.family == GAUSSIAN_LOCATION:
        return stats.norm.ppf(q, loc=theta, scale=d.sigma)
    if d.family == GAUSSIAN_SCALE:
        return stats.norm.ppf(q, scale=math.sqrt(theta))
    if d.family == STUDENT_T_SCALE:
        s = math.sqrt((d.nu - 2) * theta / d.nu)
        return s * stats.t.ppf(q, d.nu)
    if d.family == GAUSSIAN_MIXTURE2:
        lo = min(m + theta - 40 * s for m, s in zip(d.means, d.sds))
        hi = max(m + theta + 40 * s for m, s in zip(d.means, d.sds))

        def solve(qi):
            return brentq(lambda x: float(cdf(d, x, theta)) - qi, lo, hi,
                          xtol=1e-13)
        return np.vectorize(solve)(q).astype(float) if q.ndim else float(solve(float(q)))
    if d.family == PIECEWISE_TEST:
        m_left, m_right = _pw_shelf_masses(theta)
        c1 = m_left                      # cdf at -1
        c2 = m_left + 0.5                # cdf at +1
        left = _PW_LO + 2.0 * q / m_left
        win = -_PW_WIN + (q - c1) / _PW_LEVEL
        right = _PW_WIN + 2.0 * (q - c2) / m_right
        return np.where(q <= c1, left, np.where(q <= c2, win, right))
    raise DomainError(d.family)


def sample(d: ParamDensity, theta: float, n: int,
           rng: np.random.Generator) -> np.ndarray:
    if d.family == GAUSSIAN_LOCATION:
        return theta + d.sigma * rng.standard_normal(n)
    if d.family == GAUSSIAN_SCALE:
        return math.sqrt(theta) * rng.standard_normal(n)
    if d.family == STUDENT_T_SCALE:
        s = math.sqrt((d.nu - 2) * theta / d.nu)
        return s * rng.standard_t(d.nu, size=n)
    if d.family == GAUSSIAN_MIXTURE2:
        comp = rng.random(n) < d.weights[0]
        means = np.where(comp, d.means[0], d.means[1]) + theta
        sds = np.where(comp, d.sds[0], d.sds[1])
        return means + sds * rng.standard_normal(n)
    if d.family == PIECEWISE_TEST:
        return np.asarray(ppf(d, rng.random(n), theta), dtype=float)
    raise DomainError(d.family)


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------

def evaluate(d: ParamDensity, y: float, theta: float) -> EvalBundle:
    """Density, log-density, score, and second derivative at (y, theta)."""
    _check_y(d, y)
    _check_theta(d, theta)
    lp = float(log_pdf(d, y, theta))
    return EvalBundle(pdf_value=math.exp(lp), log_pdf=lp,
                      score=float(score(d, y, theta)),
                      hessian=float(log_pdf_hess(d, y, theta)))


def mass_on(d: ParamDensity, interval: Tuple[float, float], theta: float,
            quad: Optional[QuadSpec] = None) -> float:
    """Probability the family assigns to [a, b] at the given theta.

    All implemented families have a closed-form cumulative; quad is accepted
    for interface uniformity and as the fallback policy should a family
    without one be added.
    """
    a, b = interval
    if a > b:
        raise DomainError(f"empty-ordered interval [{a}, {b}]")
    lo, hi = d.outcome_domain
    a, b = max(a, lo), min(b, hi)
    if a >= b:
        return 0.0
    return float(cdf(d, b, theta) - cdf(d, a, theta))


def truncation_bounds(d: ParamDensity, theta: float,
                      tail_mass: float = 1e-12) -> Tuple[float, float]:
    """Finite interval [L, U] with at most tail_mass probability outside."""
    if not 0.0 < tail_mass < 1e-3:
        raise DomainError(f"tail_mass must lie in (0, 1e-3), got {tail_mass}")
    lo = float(ppf(d, tail_mass / 2.0, theta))
    hi = float(ppf(d, 1.0 - tail_mass / 2.0, theta))
    dlo, dhi = d.outcome_domain
    return max(lo, dlo), min(hi, dhi)


def hessian_bound(d: ParamDensity, theta_box: Tuple[float, float],
                  y_box: Tuple[float, float], grid_n: int = 101) -> float:
    """Grid estimate of c = max |d^2 log f / dtheta^2| over the boxes.

    A grid maximum, not a certified supremum; grid_n points per axis.
    """
    if grid_n < 101:
        raise DomainError("grid_n must be at least 101")
    thetas = np.linspace(theta_box[0], theta_box[1], grid_n)
    ys = np.linspace(y_box[0], y_box[1], grid_n)
    best = 0.0
    for th in thetas:
        best = max(best, float(np.max(np.abs(log_pdf_hess(d, ys, th)))))
    return best


_FAMILIES = {GAUSSIAN_LOCATION, GAUSSIAN_SCALE, STUDENT_T_SCALE,
             GAUSSIAN_MIXTURE2, PIECEWISE_TEST}
