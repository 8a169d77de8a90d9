"""Detection thresholds, probabilities, and ROC curves for both detectors.

Target presence is a test on the correlation coefficient (rho = 0 against
rho > 0).  Thresholding rho_hat is equivalent to the GLR test; D_DN is the
matched-filter magnitude alternative.  For each detector this module gives
the null threshold at a requested false-alarm probability, the closed-form
Marcum-Q ROC approximations, the exact ROC (quadrature of the rho_hat
density, or the Bessel-series CDF for D_DN), and a Monte Carlo ROC backed
by the simulator.

Curve building is fault tolerant per point: an evaluation failure (series
divergence, quadrature budget) is recorded with its reason instead of
aborting the curve, mirroring how unstable exact curves are handled in
practice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, QuadratureError, SeriesConvergenceError
from .distributions import (
    cdf_ddn_exact,
    cdf_rho_hat_null,
    cdf_rho_hat_null_inverse,
    pdf_rho_hat_exact,
)
from .model import CovarianceParams, RadarVariant
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec, integrate, marcum_q1

__all__ = [
    "DetectorScenario",
    "RocPoint",
    "RocCurve",
    "default_pfa_grid",
    "rho_threshold_for_pfa",
    "pfa_for_rho_threshold",
    "roc_rho_closed_form",
    "roc_rho_closed_form_legacy",
    "roc_rho_exact",
    "ddn_threshold_for_pfa",
    "roc_ddn_closed_form",
    "roc_ddn_exact",
    "build_roc_curve",
]

DETECTORS = ("rho-hat", "ddn")
METHODS = ("exact", "closed-form", "monte-carlo")


@dataclass(frozen=True)
class DetectorScenario:
    """Model parameters a ROC curve is evaluated under."""

    rho: float
    n: int
    sigma1: float = 1.0
    sigma2: float = 1.0
    variant: RadarVariant = RadarVariant.QTMS

    def __post_init__(self) -> None:
        if not (0.0 <= self.rho < 1.0):
            raise ParameterError(f"rho must be in [0, 1), got {self.rho}")
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ParameterError("sigmas must be positive")
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "variant", RadarVariant(self.variant))

    def to_params(self) -> CovarianceParams:
        return CovarianceParams(self.sigma1, self.sigma2, self.rho, 0.0, self.variant)


@dataclass(frozen=True)
class RocPoint:
    """One operating point: false-alarm probability, detection probability, threshold."""

    pfa: float
    pd: float
    threshold: float


@dataclass(frozen=True)
class RocCurve:
    """An ordered ROC curve with per-point failure diagnostics.

    points hold the successful evaluations (pfa strictly increasing);
    failures hold (pfa, reason) pairs for grid points that could not be
    evaluated.  rows() interleaves both for serialization.
    """

    detector: str
    method: str
    scenario: DetectorScenario
    points: tuple[RocPoint, ...]
    failures: tuple[tuple[float, str], ...] = ()
    note: str | None = None

    def rows(self) -> list[tuple[float, float | None, float | None, str]]:
        rows: list[tuple[float, float | None, float | None, str]] = [
            (p.pfa, p.pd, p.threshold, "ok") for p in self.points
        ]
        rows.extend((pfa, None, None, f"failed:{reason}") for pfa, reason in self.failures)
        rows.sort(key=lambda r: r[0])
        return rows


def default_pfa_grid() -> np.ndarray:
    """50 log-spaced points in [1e-4, 0.5] plus linear points up to 0.99."""
    log_part = np.logspace(-4, math.log10(0.5), 50)
    linear_part = np.arange(0.55, 0.9901, 0.04)
    return np.unique(np.concatenate([log_part, linear_part]))


def _check_pfa(pfa: float) -> None:
    if not (0.0 < pfa < 1.0):
        raise ParameterError(f"pfa must be in (0, 1), got {pfa}")


# ---------------------------------------------------------------------------
# rho_hat detector


def rho_threshold_for_pfa(pfa: float, n: int) -> float:
    """Threshold T with (1 - T^2)^(N-1) = pfa, i.e. sqrt(1 - pfa^(1/(N-1)))."""
    _check_pfa(pfa)
    if n != int(n) or n <= 2:
        raise ParameterError(f"n must be an integer > 2, got {n}")
    return math.sqrt(-math.expm1(math.log(pfa) / (n - 1.0)))


def pfa_for_rho_threshold(threshold: float, n: int) -> float:
    """Null exceedance probability (1 - T^2)^(N-1) of the rho_hat detector."""
    if not (0.0 <= threshold <= 1.0):
        raise ParameterError(f"threshold must be in [0, 1], got {threshold}")
    if n != int(n) or n <= 2:
        raise ParameterError(f"n must be an integer > 2, got {n}")
    return 1.0 - cdf_rho_hat_null(threshold, n)


def roc_rho_closed_form(pfa: float, rho: float, n: int) -> float:
    """Closed-form ROC of the rho_hat detector (Rice approximation, exact pfa).

    pd = Q1(rho sqrt(2N)/(1-rho^2), T sqrt(2N)/(1-rho^2)) with T the exact
    null threshold.  Intended for N of roughly 100 or more.
    """
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    t = rho_threshold_for_pfa(pfa, n)
    scale = math.sqrt(2.0 * n) / (1.0 - rho * rho)
    return marcum_q1(rho * scale, t * scale)


def roc_rho_closed_form_legacy(pfa: float, rho: float, n: int) -> float:
    """Earlier closed form with the Rice approximation used for pfa as well.

    pd = Q1(rho sqrt(2N)/(1-rho^2), sqrt(-2 ln pfa)/(1-rho^2)); converges to
    the exact-pfa form as N grows.
    """
    _check_pfa(pfa)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    if n != int(n) or n < 1:
        raise ParameterError(f"n must be an integer >= 1, got {n}")
    one_m = 1.0 - rho * rho
    return marcum_q1(rho * math.sqrt(2.0 * n) / one_m,
                     math.sqrt(-2.0 * math.log(pfa)) / one_m)


def roc_rho_exact(pfa: float, rho: float, n: int,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Exact detection probability: tail quadrature of the rho_hat density.

    Series or quadrature failures propagate with the (rho, n, pfa) triple
    attached for diagnosis.
    """
    t = rho_threshold_for_pfa(pfa, n)
    if rho == 0.0:
        return pfa_for_rho_threshold(t, n)
    try:
        pd = integrate(lambda x: pdf_rho_hat_exact(x, rho, n), t, 1.0, spec)
    except (SeriesConvergenceError, QuadratureError) as exc:
        raise type(exc)(f"{exc} [rho={rho}, n={n}, pfa={pfa}]") from exc
    return min(max(pd, 0.0), 1.0)


# ---------------------------------------------------------------------------
# D_DN detector


def ddn_threshold_for_pfa(pfa: float, sigma1: float, sigma2: float, n: int,
                          mode: str = "exact") -> float:
    """Null threshold of D_DN at a requested false-alarm probability.

    mode="approx" uses the Rayleigh-limit closed form
    T = (sigma1 sigma2 / 2) sqrt(-N ln pfa); mode="exact" solves
    1 - F_DN(T | rho=0) = pfa by bisection on the Bessel-series CDF.
    """
    _check_pfa(pfa)
    if n != int(n) or n < 1:
        raise ParameterError(f"n must be an integer >= 1, got {n}")
    if not (sigma1 > 0 and sigma2 > 0):
        raise ParameterError("sigmas must be positive")
    if mode == "approx":
        return sigma1 * sigma2 / 2.0 * math.sqrt(-n * math.log(pfa))
    if mode != "exact":
        raise ParameterError(f"mode must be 'exact' or 'approx', got {mode!r}")

    def survival(t: float) -> float:
        return 1.0 - cdf_ddn_exact(t, sigma1, sigma2, 0.0, n)

    hi = sigma1 * sigma2 * math.sqrt(n)
    expansions = 0
    while survival(hi) > pfa:
        hi *= 2.0
        expansions += 1
        if expansions > 60:
            raise QuadratureError("could not bracket the D_DN threshold")
    lo = 0.0
    tol = 1e-10 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if survival(mid) > pfa:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def roc_ddn_closed_form(pfa: float, rho: float, n: int) -> float:
    """Closed-form ROC of D_DN: pd = Q1(rho sqrt(2N), sqrt(-2 ln pfa)).

    Valid in the large-N, small-rho regime; independent of the sigmas (the
    scale cancels between threshold and distribution).
    """
    _check_pfa(pfa)
    if not (0.0 <= rho <= 1.0):
        raise ParameterError(f"rho must be in [0, 1], got {rho}")
    if n != int(n) or n < 1:
        raise ParameterError(f"n must be an integer >= 1, got {n}")
    return marcum_q1(rho * math.sqrt(2.0 * n), math.sqrt(-2.0 * math.log(pfa)))


def roc_ddn_exact(pfa: float, sigma1: float, sigma2: float, rho: float, n: int) -> float:
    """Exact detection probability of D_DN at the exact null threshold.

    Depends on the sigmas only through their product, and not even on that:
    the threshold and the distribution scale identically.  Series failures
    propagate with the parameter triple attached (instability is expected
    near large N with moderate rho).
    """
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    try:
        t = ddn_threshold_for_pfa(pfa, sigma1, sigma2, n, mode="exact")
        pd = 1.0 - cdf_ddn_exact(t, sigma1, sigma2, rho, n)
    except (SeriesConvergenceError, QuadratureError) as exc:
        raise type(exc)(f"{exc} [rho={rho}, n={n}, pfa={pfa}]") from exc
    return min(max(pd, 0.0), 1.0)


# ---------------------------------------------------------------------------
# Curve building


def _validate_grid(pfa_grid) -> np.ndarray:
    grid = np.asarray(pfa_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("pfa grid must be a nonempty 1-D sequence")
    if not (np.all(grid > 0.0) and np.all(grid < 1.0)):
        raise ParameterError("pfa grid values must lie in (0, 1)")
    if not np.all(np.diff(grid) > 0.0):
        raise ParameterError("pfa grid must be strictly increasing")
    return grid


def build_roc_curve(detector: str, method: str, scenario: DetectorScenario,
                    pfa_grid=None, trials: int = 10_000, seed: int = 0) -> RocCurve:
    """Evaluate a ROC curve point by point, recording failures instead of dying.

    detector is "rho-hat" or "ddn"; method is "exact", "closed-form", or
    "monte-carlo".  Monte Carlo curves simulate `trials` batches under the
    scenario and threshold the detector statistic at the exact null
    thresholds.
    """
    if detector not in DETECTORS:
        raise ParameterError(f"unknown detector {detector!r}; expected one of {DETECTORS}")
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    grid = _validate_grid(default_pfa_grid() if pfa_grid is None else pfa_grid)
    if detector == "rho-hat" and scenario.n <= 2:
        raise ParameterError("the rho-hat detector requires n > 2")

    note = None
    if method == "closed-form" and scenario.n < 100:
        note = "closed-form ROC is an approximation intended for N >~ 100"
    elif method == "monte-carlo":
        note = f"monte-carlo with trials={trials}, seed={seed}"

    stat_values: np.ndarray | None = None
    if method == "monte-carlo":
        from .simulator import SimConfig, run_trials  # local import: avoids cycle at import time

        results = run_trials(SimConfig(scenario.to_params(), scenario.n, trials, seed))
        stat_values = results.rho_hat if detector == "rho-hat" else results.ddn

    def threshold_for(pfa: float) -> float:
        if detector == "rho-hat":
            return rho_threshold_for_pfa(pfa, scenario.n)
        mode = "approx" if method == "closed-form" else "exact"
        return ddn_threshold_for_pfa(pfa, scenario.sigma1, scenario.sigma2, scenario.n, mode)

    def pd_for(pfa: float, thr: float) -> float:
        if method == "monte-carlo":
            return float(np.mean(stat_values > thr))
        if detector == "rho-hat":
            if method == "exact":
                return roc_rho_exact(pfa, scenario.rho, scenario.n)
            return roc_rho_closed_form(pfa, scenario.rho, scenario.n)
        if method == "exact":
            return 1.0 - cdf_ddn_exact(thr, scenario.sigma1, scenario.sigma2,
                                       scenario.rho, scenario.n)
        return roc_ddn_closed_form(pfa, scenario.rho, scenario.n)

    points: list[RocPoint] = []
    failures: list[tuple[float, str]] = []
    for pfa in grid:
        pfa = float(pfa)
        try:
            thr = threshold_for(pfa)
            pd = min(max(pd_for(pfa, thr), 0.0), 1.0)
        except (SeriesConvergenceError, QuadratureError, OverflowError) as exc:
            failures.append((pfa, str(exc)))
            continue
        points.append(RocPoint(pfa=pfa, pd=pd, threshold=thr))
    return RocCurve(detector=detector, method=method, scenario=scenario,
                    points=tuple(points), failures=tuple(failures), note=note)
