"""Closed-form parameter estimators and detector statistics.

Both the minimum-Frobenius-norm fit and maximum-likelihood estimation of
the structured covariance lead to the same closed forms:

    sigma1_hat = sqrt(P1_bar / 2)
    sigma2_hat = sqrt(P2_bar / 2)
    rho_hat    = sqrt((Rc_bar^2 + Rs_bar^2) / (P1_bar * P2_bar))
    phi_hat    = atan2(Rs_bar, Rc_bar)

The two optimization objectives (squared Frobenius distance g1, which the
estimators minimize, and the likelihood-equivalent g2, which they maximize)
are implemented in both matrix and expanded scalar form so tests can
cross-check the algebra numerically.  No iterative optimizer is used for
estimation; the closed forms are the whole point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ParameterError,
    PerfectCorrelationError,
    SingularCovarianceError,
    ZeroSignalPowerError,
)
from .model import CovarianceParams, SampleStats, build_covariance, wrap_phase

__all__ = [
    "Estimates",
    "estimate",
    "log_likelihood",
    "mfn_objective",
    "mfn_objective_expanded",
    "mfn_objective_minimum",
    "ml_objective",
    "ml_objective_expanded",
    "glr_statistic",
    "ddn_statistic",
]


@dataclass(frozen=True)
class Estimates:
    """The four estimates plus degeneracy flags.

    rho_clamped marks a raw ratio above 1 (possible in finite samples) that
    was clamped to the constraint boundary.  phi_degenerate marks
    Rc_bar = Rs_bar = 0, where the phase carries no information and is set
    to 0 by convention.
    """

    sigma1_hat: float
    sigma2_hat: float
    rho_hat: float
    phi_hat: float
    rho_clamped: bool = False
    phi_degenerate: bool = False


def estimate(stats: SampleStats) -> Estimates:
    """Closed-form estimates from the auxiliary sums.

    Raises ZeroSignalPowerError when either channel has zero sample power,
    which leaves rho and phi undefined.
    """
    if stats.p1_bar < 0 or stats.p2_bar < 0:
        raise ParameterError("channel powers must be nonnegative")
    sigma1_hat = math.sqrt(stats.p1_bar / 2.0)
    sigma2_hat = math.sqrt(stats.p2_bar / 2.0)
    if stats.p1_bar == 0.0 or stats.p2_bar == 0.0:
        raise ZeroSignalPowerError(
            "zero signal power: rho and phi are undefined "
            f"(p1_bar={stats.p1_bar}, p2_bar={stats.p2_bar})")
    cross_sq = stats.rc_bar**2 + stats.rs_bar**2
    raw = math.sqrt(cross_sq / (stats.p1_bar * stats.p2_bar))
    clamped = raw > 1.0
    rho_hat = 1.0 if clamped else raw
    degenerate = stats.rc_bar == 0.0 and stats.rs_bar == 0.0
    phi_hat = 0.0 if degenerate else wrap_phase(math.atan2(stats.rs_bar, stats.rc_bar))
    return Estimates(
        sigma1_hat=sigma1_hat, sigma2_hat=sigma2_hat, rho_hat=rho_hat, phi_hat=phi_hat,
        rho_clamped=clamped, phi_degenerate=degenerate,
    )


def _check_variant(params: CovarianceParams, stats: SampleStats) -> None:
    if params.variant is not stats.variant:
        raise ParameterError(
            f"variant mismatch: params use {params.variant.value}, stats use {stats.variant.value}")


def _require_positive_definite(params: CovarianceParams) -> None:
    # |Sigma| = sigma1^4 sigma2^4 (1 - rho^2)^2, so singularity is exactly
    # rho = 1 or a zero sigma.
    if params.rho >= 1.0 or params.sigma1 == 0.0 or params.sigma2 == 0.0:
        raise SingularCovarianceError(
            f"covariance is singular at sigma1={params.sigma1}, "
            f"sigma2={params.sigma2}, rho={params.rho}")


def log_likelihood(params: CovarianceParams, stats: SampleStats) -> float:
    """Gaussian log-likelihood -(N/2) (ln|Sigma| + 4 ln 2pi + tr(Sigma^-1 S_hat)).

    The sample average of the quadratic form x^T Sigma^-1 x equals
    tr(Sigma^-1 S_hat), so the likelihood depends on the data only through
    the sample covariance.
    """
    _check_variant(params, stats)
    _require_positive_definite(params)
    sigma = build_covariance(params)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise SingularCovarianceError("covariance determinant is not positive")
    quad = float(np.trace(np.linalg.solve(sigma, stats.s_hat)))
    return -stats.n / 2.0 * (logdet + 4.0 * math.log(2.0 * math.pi) + quad)


def mfn_objective(params: CovarianceParams, stats: SampleStats) -> float:
    """Squared Frobenius distance || Sigma(params) - S_hat ||_F^2."""
    _check_variant(params, stats)
    diff = build_covariance(params) - stats.s_hat
    return float(np.sum(diff * diff))


def mfn_objective_expanded(params: CovarianceParams, stats: SampleStats) -> float:
    """The same distance in expanded scalar form (cross-check of the algebra)."""
    _check_variant(params, stats)
    s1sq, s2sq = params.sigma1**2, params.sigma2**2
    rho, phi = params.rho, params.phi
    cross = stats.rc_bar * math.cos(phi) + stats.rs_bar * math.sin(phi)
    frob_sq = float(np.sum(stats.s_hat * stats.s_hat))
    return (2.0 * (s1sq**2 + 2.0 * rho**2 * s1sq * s2sq + s2sq**2)
            - 2.0 * (stats.p1_bar * s1sq + stats.p2_bar * s2sq)
            - 4.0 * rho * params.sigma1 * params.sigma2 * cross
            + frob_sq)


def mfn_objective_minimum(stats: SampleStats) -> float:
    """Closed form of the minimized squared Frobenius distance."""
    frob_sq = float(np.sum(stats.s_hat * stats.s_hat))
    return (frob_sq - (stats.p1_bar**2 + stats.p2_bar**2) / 2.0
            - stats.rc_bar**2 - stats.rs_bar**2)


def ml_objective(params: CovarianceParams, stats: SampleStats) -> float:
    """Likelihood-equivalent objective -ln|Sigma| - tr(Sigma^-1 S_hat) (matrix form)."""
    _check_variant(params, stats)
    _require_positive_definite(params)
    sigma = build_covariance(params)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise SingularCovarianceError("covariance determinant is not positive")
    return -logdet - float(np.trace(np.linalg.solve(sigma, stats.s_hat)))


def ml_objective_expanded(params: CovarianceParams, stats: SampleStats) -> float:
    """The same objective in expanded scalar form (cross-check of the algebra)."""
    _check_variant(params, stats)
    _require_positive_definite(params)
    s1sq, s2sq = params.sigma1**2, params.sigma2**2
    rho, phi = params.rho, params.phi
    one_m = 1.0 - rho**2
    cross = stats.rc_bar * math.cos(phi) + stats.rs_bar * math.sin(phi)
    return (-2.0 * math.log(s1sq * s2sq * one_m)
            - (stats.p1_bar / s1sq + stats.p2_bar / s2sq
               - 2.0 * rho * cross / (params.sigma1 * params.sigma2)) / one_m)


def glr_statistic(stats: SampleStats) -> float:
    """Generalized likelihood ratio statistic -2N ln(1 - rho_hat^2).

    Equivalently 2N ln(P1_bar P2_bar / (P1_bar P2_bar - Rc_bar^2 - Rs_bar^2)).
    A strictly increasing function of rho_hat, so thresholding it is the
    same test as thresholding rho_hat.  rho_hat = 1 makes the statistic
    infinite and raises PerfectCorrelationError.
    """
    est = estimate(stats)
    if est.rho_hat >= 1.0:
        raise PerfectCorrelationError("rho_hat = 1 gives an infinite GLR statistic")
    return -2.0 * stats.n * math.log1p(-est.rho_hat**2)


def ddn_statistic(stats: SampleStats) -> float:
    """Matched-filter magnitude detector (N/4) sqrt(Rc_bar^2 + Rs_bar^2)."""
    return stats.n / 4.0 * math.hypot(stats.rc_bar, stats.rs_bar)
