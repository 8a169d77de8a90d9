"""Monte Carlo ground truth for the estimator and detector distributions.

Batches are drawn from the zero-mean 4-variate Gaussian model by coloring
standard normal samples with a matrix square root of the structured
covariance.  Each trial uses its own counter-based Philox stream keyed by
(seed, trial index), so results are bit-reproducible and independent of
how many trials run or in what order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError, PerfectCorrelationError
from .estimators import Estimates, ddn_statistic, estimate, glr_statistic
from .model import (
    CovarianceParams,
    IQBatch,
    build_covariance,
    sample_covariance,
    auxiliary_stats,
)

__all__ = [
    "SimConfig",
    "TrialResults",
    "trial_rng",
    "sample_batch",
    "run_trials",
    "EmpiricalCdf",
    "empirical_cdf",
    "histogram_tvd",
]


@dataclass(frozen=True)
class SimConfig:
    """A reproducible experiment: model, samples per trial, trials, seed."""

    params: CovarianceParams
    n_per_trial: int
    trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_per_trial < 1:
            raise ParameterError(f"n_per_trial must be >= 1, got {self.n_per_trial}")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if not (0 <= self.seed < 2**64):
            raise ParameterError("seed must fit in an unsigned 64-bit integer")


@dataclass(eq=False)
class TrialResults:
    """Per-trial estimates and detector statistics as flat arrays."""

    sigma1_hat: np.ndarray
    sigma2_hat: np.ndarray
    rho_hat: np.ndarray
    phi_hat: np.ndarray
    rho_clamped: np.ndarray
    phi_degenerate: np.ndarray
    ddn: np.ndarray
    glr: np.ndarray

    @property
    def trials(self) -> int:
        return self.rho_hat.shape[0]

    @cached_property
    def estimates(self) -> tuple[Estimates, ...]:
        """Per-trial Estimates records (materialized on first access)."""
        return tuple(
            Estimates(
                sigma1_hat=float(self.sigma1_hat[i]),
                sigma2_hat=float(self.sigma2_hat[i]),
                rho_hat=float(self.rho_hat[i]),
                phi_hat=float(self.phi_hat[i]),
                rho_clamped=bool(self.rho_clamped[i]),
                phi_degenerate=bool(self.phi_degenerate[i]),
            )
            for i in range(self.trials)
        )


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent per-trial generator keyed by (seed, trial index)."""
    key = (int(seed) << 64) | int(trial_index)
    return np.random.Generator(np.random.Philox(key=key))


def _coloring_factor(params: CovarianceParams) -> np.ndarray:
    """Matrix L with L L^T = Sigma; eigendecomposition fallback for PSD rank loss.

    rho = 1 is a legitimate sampling point even though the estimators
    exclude it, so Cholesky failure falls back to the symmetric square root
    with tiny negative eigenvalues clipped to zero.
    """
    sigma = build_covariance(params)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        eigvals, eigvecs = np.linalg.eigh(sigma)
        return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def sample_batch(params: CovarianceParams, n: int, rng: np.random.Generator) -> IQBatch:
    """Draw n independent samples of (I1, Q1, I2, Q2) from the model."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    factor = _coloring_factor(params)
    x = rng.standard_normal((n, 4)) @ factor.T
    return IQBatch(i1=x[:, 0], q1=x[:, 1], i2=x[:, 2], q2=x[:, 3])


def run_trials(config: SimConfig) -> TrialResults:
    """Run the full estimation pipeline over independent trials.

    Each trial draws a batch, forms the sample covariance and auxiliary
    sums, and records the estimates plus the D_DN and GLR statistics.  A
    trial with rho_hat = 1 (certain at N = 1) records an infinite GLR.
    """
    trials = config.trials
    out = {name: np.empty(trials) for name in
           ("sigma1_hat", "sigma2_hat", "rho_hat", "phi_hat", "ddn", "glr")}
    clamped = np.zeros(trials, dtype=bool)
    degenerate = np.zeros(trials, dtype=bool)
    factor = _coloring_factor(config.params)
    variant = config.params.variant
    n = config.n_per_trial
    for i in range(trials):
        rng = trial_rng(config.seed, i)
        x = rng.standard_normal((n, 4)) @ factor.T
        s = x.T @ x / n
        stats = auxiliary_stats((s + s.T) / 2.0, n, variant)
        est = estimate(stats)
        out["sigma1_hat"][i] = est.sigma1_hat
        out["sigma2_hat"][i] = est.sigma2_hat
        out["rho_hat"][i] = est.rho_hat
        out["phi_hat"][i] = est.phi_hat
        clamped[i] = est.rho_clamped
        degenerate[i] = est.phi_degenerate
        out["ddn"][i] = ddn_statistic(stats)
        try:
            out["glr"][i] = glr_statistic(stats)
        except PerfectCorrelationError:
            out["glr"][i] = math.inf
    return TrialResults(rho_clamped=clamped, phi_degenerate=degenerate, **out)


class EmpiricalCdf:
    """Right-continuous empirical CDF of a sample."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ParameterError("empirical_cdf needs a nonempty 1-D sample")
        self._sorted = np.sort(values)
        self._n = values.size

    @property
    def values(self) -> np.ndarray:
        return self._sorted

    def __call__(self, x):
        idx = np.searchsorted(self._sorted, np.asarray(x, dtype=float), side="right")
        result = idx / self._n
        return float(result) if np.isscalar(x) or np.ndim(x) == 0 else result


def empirical_cdf(values) -> EmpiricalCdf:
    """Build the right-continuous ECDF of a sample."""
    return EmpiricalCdf(values)


def histogram_tvd(samples, pdf, bins: int = 100) -> float:
    """TVD between a binned sample and a density.

    Uses equal-width bins over the empirical support; each bin's model
    probability comes from a Simpson rule over the bin.  Density mass
    falling outside the sampled range counts fully toward the distance.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ParameterError("histogram_tvd needs a nonempty sample")
    counts, edges = np.histogram(samples, bins=bins)
    empirical = counts / samples.size
    mids = (edges[:-1] + edges[1:]) / 2.0
    f_edges = np.array([pdf(float(x)) for x in edges])
    f_mids = np.array([pdf(float(m)) for m in mids])
    widths = np.diff(edges)
    model = widths / 6.0 * (f_edges[:-1] + 4.0 * f_mids + f_edges[1:])
    outside = max(0.0, 1.0 - float(model.sum()))
    return 0.5 * (float(np.abs(empirical - model).sum()) + outside)
