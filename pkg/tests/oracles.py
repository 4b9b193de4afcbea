"""Closed-form oracle layer for the Gaussian location model.

Used only by the tests, never by the library paths under test.  All
quantities follow from the standard-normal algebra for the model
f(y|theta) = N(theta, 1) with truth N(lam, 1) and m = lam - theta.
"""

import math


def kl_gauss_loc(m: float) -> float:
    return 0.5 * m * m


def ekl_sd(m: float, alpha: float) -> float:
    return 0.5 * ((1.0 - alpha) ** 2 * m * m + alpha ** 2)


def delta_ekl_sd(m: float, alpha: float) -> float:
    return 0.5 * (alpha * alpha * (1.0 + m * m) - 2.0 * alpha * m * m)


def alpha_bar_ekl(m: float, c: float = 1.0) -> float:
    return (2.0 / c) * m * m / (m * m + 1.0)


def expected_update_gap(m: float, alpha: float) -> float:
    """|theta_star - E[theta_upd]| with theta_star = lam, theta_pred = 0."""
    return abs(m) * abs(1.0 - alpha)


def norm_pdf(x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    z = (x - mean) / sd
    return math.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))


def norm_cdf(x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    return 0.5 * math.erfc(-(x - mean) / (sd * math.sqrt(2.0)))
