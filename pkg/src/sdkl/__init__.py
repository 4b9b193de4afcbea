"""Score-driven updates evaluated by localized Kullback-Leibler criteria.

The package provides parametric density families with analytic scores,
score-driven updating rules (including downscaled, quasi, sign-flipped and
randomized-lazy variants), trimmed/censored/expected KL divergences computed
by shared-panel adaptive quadrature, and a verification lab that checks the
sign and bound predictions on shrinking-step schedules.
"""

from .densities import (EvalBundle, ParamDensity, evaluate, gaussian_location,
                        gaussian_scale, gaussian_mixture2, hessian_bound,
                        make_density, mass_on, piecewise_test,
                        student_t_scale, truncation_bounds)
from .divergences import (Ball, DivergenceReport, ckl, delta_ekl,
                          delta_ekl_report, ekl, kl, learning_rate_bounds,
                          localized_deltas, scoring_rules, tkl)
from .errors import (ConfigError, DegenerateLocalization, DegenerateScenario,
                     DomainError, IntegrationFailure, SdklError)
from .quadrature import QuadResult, QuadSpec, adaptive_quad, integrate
from .rules import (EPS_SIGN, MomentSummary, TriState, UpdateRule,
                    anti_score, apply_update, delta, downscaled,
                    is_score_equivalent_at, is_score_equivalent_in_expectation,
                    lazy, moments, predict, quasi_score_driven, score_driven,
                    step)
from .theorems import (AlphaBoundsResult, QsdReport, Scenario, ScheduleStep,
                       SignReport, check_alpha_bounds, check_lemma1,
                       check_qsd, check_theorem1, check_theorem2,
                       check_theorem3, corrected_ball, figure1_data,
                       impropriety_demo, pseudo_truth)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
