"""Second-period analytics: stigma, best responses, testing rates, beliefs,
and continuation values for the partially separating outcome.

Population B discriminates against observed testing whenever its own
interaction value falls below the perceived-risk cutoff; the mass of such
players is the stigma index S. Population A tests when the health gain net
of the expected social loss S*y is positive, which only ever attracts
high-risk players, so testing is an informative signal.

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import DistributionSpec, cdf, mean, partial_expectation

__all__ = [
    "AssumptionViolation",
    "ModelParams",
    "Period2Outcome",
    "AssumptionReport",
    "stigma_level",
    "testing_threshold",
    "testing_rates",
    "best_response_test",
    "best_response_interact",
    "continuation_values",
    "pointwise_continuation",
    "positive_fraction",
    "check_assumptions",
    "period2_outcome",
]


class AssumptionViolation(ValueError):
    """A maintained model assumption fails for the given parameters."""

    def __init__(self, assumption: str, message: str):
        self.assumption = assumption
        super().__init__(f"{assumption} violated: {message}")


@dataclass(frozen=True)
class ModelParams:
    """Exogenous scalars plus the two population distributions.

    theta_L/theta_H: infection probabilities of the low/high risk types.
    v: treatment benefit of a positive test; c: direct testing cost;
    c_h: infection cost (choice-irrelevant); z: partner's health cost if
    infected; u: period-1 payoff premium of the unsafe choice; M: period-1
    payoff of successful coordination; tau_hat: perceived transmission risk
    (the policy instrument); tau_true: actual transmission risk.
    dist_beta governs present bias, dist_y interaction valuations.
    """

    theta_L: float
    theta_H: float
    v: float
    c: float
    c_h: float
    z: float
    u: float
    dist_beta: DistributionSpec
    dist_y: DistributionSpec
    tau_hat: float
    M: float = 1.0
    tau_true: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.theta_L < self.theta_H < 1.0:
            raise ValueError(
                f"need 0 < theta_L < theta_H < 1, got "
                f"({self.theta_L!r}, {self.theta_H!r})"
            )
        for name in ("v", "c", "c_h", "z", "u", "M"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {val!r}")
        for name in ("tau_hat", "tau_true"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val!r}")
        # testing must be worthwhile for high risk only; checked here rather
        # than silently assumed downstream
        if not self.theta_L * self.v < self.c:
            raise AssumptionViolation(
                "assumption 1",
                f"theta_L*v = {self.theta_L * self.v!r} must be < c = {self.c!r}",
            )
        if not self.c < self.theta_H * self.v:
            raise AssumptionViolation(
                "assumption 1",
                f"c = {self.c!r} must be < theta_H*v = {self.theta_H * self.v!r}",
            )


@dataclass(frozen=True)
class Period2Outcome:
    """Derived period-2 quantities at a given high-risk fraction r."""

    S: float
    y_star: float
    R_H: float
    R: float
    EV_L: float
    EV_H: float
    gap: float
    h_bar: float
    belief_tested: float
    belief_untested_range: tuple[float, float]


@dataclass(frozen=True)
class AssumptionReport:
    """Booleans plus numeric margins for the three maintained assumptions.

    a2 is enforced by construction in the interaction best response (an
    untested partner is always accepted), so it is reported as the mass of
    B players whose valuation falls below the population-average risk
    cutoff instead of as a hard failure.
    """

    a1_holds: bool
    a1_margin: float
    a2_violating_mass: float
    a3_holds: bool
    a3_margin: float
    h_bar: float


def stigma_level(params: ModelParams) -> float:
    """Mass of B players who reject a tested partner: G(tau_hat*theta_H*z)."""
    return cdf(params.dist_y, params.tau_hat * params.theta_H * params.z)


def testing_threshold(params: ModelParams, S: float) -> float:
    """Valuation below which a high-risk player tests; +inf when S = 0."""
    if S == 0.0:
        return math.inf
    return (params.theta_H * params.v - params.c) / S


def testing_rates(params: ModelParams, S: float, r: float) -> tuple[float, float]:
    """(R_H, R): testing rate among high-risk players and in population A.

    The S = 0 limit is taken explicitly (R_H = 1, R = r) rather than by
    dividing by zero; saturation of the CDF covers thresholds beyond the
    valuation support.
    """
    y_star = testing_threshold(params, S)
    r_h = 1.0 if math.isinf(y_star) else cdf(params.dist_y, y_star)
    return r_h, r * r_h


def best_response_test(theta_a: float, y_a: float, S: float, params: ModelParams) -> int:
    """1 iff testing beats abstaining: theta_a*v - c - S*y_a > 0 (strict)."""
    return 1 if theta_a * params.v - params.c - S * y_a > 0.0 else 0


def best_response_interact(t_a: int, y_b: float, params: ModelParams) -> int:
    """B accepts any untested partner; a tested one only above the cutoff.

    Indifference at the cutoff resolves to acceptance.
    """
    if t_a == 0:
        return 1
    return 1 if y_b >= params.tau_hat * params.theta_H * params.z else 0


def continuation_values(params: ModelParams, S: float) -> tuple[float, float, float]:
    """(EV_L, EV_H, gap): expected period-2 payoffs by risk type.

    EV_H adds the expected testing bonus
    integral of (theta_H*v - c - y*S) over y below the testing threshold,
    evaluated in closed form through the CDF and the truncated first moment.
    """
    net = params.theta_H * params.v - params.c
    y_star = testing_threshold(params, S)
    bonus = net * (1.0 if math.isinf(y_star) else cdf(params.dist_y, y_star))
    bonus -= S * partial_expectation(params.dist_y, y_star)
    mu = mean(params.dist_y)
    ev_l = mu - params.theta_L * params.c_h
    ev_h = mu - params.theta_H * params.c_h + bonus
    return ev_l, ev_h, ev_l - ev_h


def pointwise_continuation(params: ModelParams, S: float, y_a: float, risk: str) -> float:
    """Period-2 payoff at a single valuation y_a for risk type "L" or "H"."""
    if risk == "L":
        return y_a - params.theta_L * params.c_h
    if risk != "H":
        raise ValueError(f"risk must be 'L' or 'H', got {risk!r}")
    value = y_a - params.theta_H * params.c_h
    net = params.theta_H * params.v - params.c - S * y_a
    if net > 0.0:
        value += net
    return value


def positive_fraction(params: ModelParams, r: float) -> float:
    """Population infection rate implied by the risk-type mixture."""
    return r * params.theta_H + (1.0 - r) * params.theta_L


def check_assumptions(params: ModelParams) -> AssumptionReport:
    """Report the three maintained assumptions with their numeric margins.

    Purely diagnostic: nothing is raised here (strict enforcement is a CLI
    concern). The a2 mass is evaluated at the equilibrium infection rate,
    which requires running the period-1 chain; when the continuation gap
    is non-positive every pair coordinates on unsafe, so r = 1 there.
    """
    a1_margin = min(
        params.c - params.theta_L * params.v,
        params.theta_H * params.v - params.c,
    )
    a3_margin = (
        params.c_h * (params.theta_H - params.theta_L)
        - (params.theta_H * params.v - params.c)
    )
    S = stigma_level(params)
    _, _, gap = continuation_values(params, S)
    if gap <= 0.0:
        r = 1.0
    else:
        from .coordination import period1_outcome

        r = period1_outcome(params, gap).r
    h_bar = positive_fraction(params, r)
    a2_mass = cdf(params.dist_y, params.tau_hat * h_bar * params.z)
    return AssumptionReport(
        a1_holds=a1_margin > 0.0,
        a1_margin=a1_margin,
        a2_violating_mass=a2_mass,
        a3_holds=a3_margin > 0.0,
        a3_margin=a3_margin,
        h_bar=h_bar,
    )


def period2_outcome(params: ModelParams, r: float) -> Period2Outcome:
    """Bundle the period-2 quantities at a given high-risk fraction r."""
    S = stigma_level(params)
    y_star = testing_threshold(params, S)
    r_h, r_pop = testing_rates(params, S, r)
    ev_l, ev_h, gap = continuation_values(params, S)
    h_bar = positive_fraction(params, r)
    return Period2Outcome(
        S=S,
        y_star=y_star,
        R_H=r_h,
        R=r_pop,
        EV_L=ev_l,
        EV_H=ev_h,
        gap=gap,
        h_bar=h_bar,
        belief_tested=params.theta_H,
        belief_untested_range=(params.theta_L, h_bar),
    )
