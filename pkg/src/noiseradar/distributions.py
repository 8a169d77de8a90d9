"""Sampling distributions of the estimators and the D_DN detector.

Exact densities:

* sigma_hat follows a rescaled chi distribution (a Nakagami m-distribution
  with m = N, Omega = sigma^2).
* rho_hat has the coherence-magnitude density
  2 (N-1) (1-rho^2)^N x (1-x^2)^(N-2) 2F1(N, N; 1; rho^2 x^2), N > 2.
* phi_hat has a two-term density in xi = rho cos(theta - phi) involving
  2F1(N, 1; 1/2; xi^2), symmetric about phi.
* D_DN has a Bessel-K / Bessel-I density in the normalized variable
  x_tilde = 2 x / (sigma1 sigma2), with a series CDF.

Closed-form approximations: Rice for rho_hat and for D_DN, von Mises for
phi_hat.  Approximation quality is quantified by the total variation
distance, half the integrated absolute difference between densities.

All exact-density prefactors are assembled in log domain and exponentiated
last; Gamma(N), (1-rho^2)^N and x^N individually overflow double precision
well inside the parameter ranges of interest (N up to several hundred).
Density evaluators return 0.0 outside their support; parameter-domain
violations raise ParameterError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import (
    DegenerateDistributionError,
    ParameterError,
    QuadratureError,
    SeriesConvergenceError,
)
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate,
    ln_bessel_i,
    ln_bessel_k,
    ln_gamma,
    ln_gauss_2f1,
    marcum_q1,
)

__all__ = [
    "RiceParams",
    "VonMisesParams",
    "DistributionSpec",
    "pdf_sigma_hat",
    "pdf_rho_hat_exact",
    "cdf_rho_hat_exact",
    "cdf_rho_hat_null",
    "cdf_rho_hat_null_inverse",
    "rice_approx_for_rho",
    "pdf_rice",
    "cdf_rice",
    "pdf_rayleigh",
    "pdf_phi_hat_exact",
    "mean_resultant_length",
    "kappa_from_resultant_length",
    "von_mises_approx_for_phi",
    "pdf_von_mises",
    "pdf_ddn_exact",
    "cdf_ddn_exact",
    "rice_approx_for_ddn",
    "total_variation_distance",
    "cdf_grid",
]

_DDN_SERIES_MAX_TERMS = 10**5
_DDN_SERIES_RTOL = 1e-14


@dataclass(frozen=True)
class RiceParams:
    """Rice distribution parameters: offset alpha >= 0 and spread beta > 0."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ParameterError(f"Rice beta must be > 0, got {self.beta}")
        if self.alpha < 0:
            raise ParameterError(f"Rice alpha must be >= 0, got {self.alpha}")


@dataclass(frozen=True)
class VonMisesParams:
    """Von Mises parameters: mean direction mu and concentration kappa > 0."""

    mu: float
    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ParameterError(f"von Mises kappa must be > 0, got {self.kappa}")


def _check_count(n: float, minimum: int, name: str = "n") -> int:
    if n != int(n) or n < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {n}")
    return int(n)


# ---------------------------------------------------------------------------
# sigma_hat


def pdf_sigma_hat(x: float, sigma: float, n: int) -> float:
    """Density of sigma_hat: (2 N^N / (Gamma(N) sigma^(2N))) x^(2N-1) e^(-N x^2 / sigma^2)."""
    n = _check_count(n, 1)
    if not sigma > 0:
        raise ParameterError(f"sigma must be > 0, got {sigma}")
    if x <= 0.0:
        return 0.0
    ln_pdf = (math.log(2.0) + n * math.log(n) - ln_gamma(n) - 2.0 * n * math.log(sigma)
              + (2.0 * n - 1.0) * math.log(x) - n * x * x / (sigma * sigma))
    return math.exp(ln_pdf)


# ---------------------------------------------------------------------------
# rho_hat


def _check_rho_exact_params(rho: float, n: int) -> int:
    n = _check_count(n, 3)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    return n


def pdf_rho_hat_exact(x: float, rho: float, n: int) -> float:
    """Exact density of rho_hat on [0, 1] for N > 2 and rho < 1.

    2F1 non-convergence (possible as rho -> 1 with x -> 1) propagates as
    SeriesConvergenceError.
    """
    n = _check_rho_exact_params(rho, n)
    if x <= 0.0 or x >= 1.0:
        return 0.0
    if rho == 0.0:
        # 2F1 term is identically 1; keep the closed form exact.
        return 2.0 * (n - 1) * x * (1.0 - x * x) ** (n - 2)
    z = (rho * x) ** 2
    ln_pdf = (math.log(2.0 * (n - 1)) + n * math.log1p(-rho * rho) + math.log(x)
              + (n - 2.0) * math.log1p(-x * x) + ln_gauss_2f1(n, n, 1.0, z))
    return math.exp(ln_pdf)


def cdf_rho_hat_exact(x: float, rho: float, n: int,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """CDF of rho_hat by adaptive quadrature of the exact density."""
    n = _check_rho_exact_params(rho, n)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    if rho == 0.0:
        return cdf_rho_hat_null(x, n)
    value = integrate(lambda t: pdf_rho_hat_exact(t, rho, n), 0.0, x, spec)
    return min(max(value, 0.0), 1.0)


def cdf_rho_hat_null(x: float, n: int) -> float:
    """Closed-form null CDF 1 - (1 - x^2)^(N-1) of rho_hat when rho = 0."""
    n = _check_count(n, 3)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return -math.expm1((n - 1.0) * math.log1p(-x * x))


def cdf_rho_hat_null_inverse(p: float, n: int) -> float:
    """Quantile of the null CDF: x with cdf_rho_hat_null(x, n) = p."""
    n = _check_count(n, 3)
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"probability must be in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return math.sqrt(-math.expm1(math.log1p(-p) / (n - 1.0)))


def rice_approx_for_rho(rho: float, n: int) -> RiceParams:
    """Rice approximation of rho_hat: alpha = rho, beta = (1-rho^2)/sqrt(2N).

    Intended for N of roughly 100 or more, but computable for any N >= 1.
    """
    n = _check_count(n, 1)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    return RiceParams(alpha=rho, beta=(1.0 - rho * rho) / math.sqrt(2.0 * n))


# ---------------------------------------------------------------------------
# Rice / Rayleigh


def pdf_rice(x: float, p: RiceParams) -> float:
    """Rice density (x/beta^2) exp(-(x^2+alpha^2)/(2 beta^2)) I0(x alpha / beta^2)."""
    if x <= 0.0:
        return 0.0
    b2 = p.beta * p.beta
    ln_pdf = (math.log(x) - math.log(b2) - (x * x + p.alpha * p.alpha) / (2.0 * b2)
              + ln_bessel_i(0, x * p.alpha / b2))
    return math.exp(ln_pdf)


def cdf_rice(x: float, p: RiceParams) -> float:
    """Rice CDF 1 - Q1(alpha/beta, x/beta)."""
    if x <= 0.0:
        return 0.0
    return 1.0 - marcum_q1(p.alpha / p.beta, x / p.beta)


def pdf_rayleigh(x: float, scale: float) -> float:
    """Rayleigh density (x/scale^2) exp(-x^2 / (2 scale^2))."""
    if not scale > 0:
        raise ParameterError(f"Rayleigh scale must be > 0, got {scale}")
    if x <= 0.0:
        return 0.0
    s2 = scale * scale
    return x / s2 * math.exp(-x * x / (2.0 * s2))


# ---------------------------------------------------------------------------
# phi_hat


def pdf_phi_hat_exact(theta: float, rho: float, phi: float, n: int) -> float:
    """Exact density of phi_hat, symmetric about theta = phi.

    With xi = rho cos(theta - phi), the density is

        Gamma(N + 1/2) (1-rho^2)^N xi / (2 sqrt(pi) Gamma(N) (1-xi^2)^(N+1/2))
        + (1-rho^2)^N / (2 pi) * 2F1(N, 1; 1/2; xi^2).

    Periodic in theta, so no wrapping is required.  2F1 divergence as
    rho |cos| -> 1 propagates as SeriesConvergenceError.
    """
    n = _check_count(n, 1)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    if rho == 0.0:
        return 1.0 / (2.0 * math.pi)
    xi = rho * math.cos(theta - phi)
    ln_one_m_rho2 = math.log1p(-rho * rho)
    xi2 = xi * xi
    term2 = math.exp(n * ln_one_m_rho2 - math.log(2.0 * math.pi)
                     + ln_gauss_2f1(n, 1.0, 0.5, xi2))
    if xi == 0.0:
        return term2
    ln_t1 = (ln_gamma(n + 0.5) - ln_gamma(n) + n * ln_one_m_rho2 + math.log(abs(xi))
             - math.log(2.0) - 0.5 * math.log(math.pi) - (n + 0.5) * math.log1p(-xi2))
    term1 = math.copysign(math.exp(ln_t1), xi)
    return term1 + term2


def mean_resultant_length(rho: float, phi: float, n: int,
                          spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Modulus of the circular first moment of the exact phi_hat density.

    The component orthogonal to the phi direction vanishes by symmetry; the
    quadrature result is required to confirm that below 1e-8 as a sanity
    check on the integration.
    """
    n = _check_count(n, 1)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    if rho == 0.0:
        return 0.0
    along = integrate(lambda t: pdf_phi_hat_exact(t, rho, phi, n) * math.cos(t - phi),
                      phi - math.pi, phi + math.pi, spec)
    across = integrate(lambda t: pdf_phi_hat_exact(t, rho, phi, n) * math.sin(t - phi),
                       phi - math.pi, phi + math.pi, spec)
    if abs(across) >= 1e-8:
        raise QuadratureError(
            f"asymmetric circular moment ({across:.3e}) at rho={rho}, n={n}")
    return math.hypot(along, across)


def kappa_from_resultant_length(r: float) -> float:
    """Von Mises concentration from the mean resultant length: R(2-R^2)/(1-R^2)."""
    if not (0.0 <= r < 1.0):
        raise ParameterError(f"mean resultant length must be in [0, 1), got {r}")
    return r * (2.0 - r * r) / (1.0 - r * r)


def von_mises_approx_for_phi(rho: float, phi: float, n: int) -> VonMisesParams:
    """Von Mises approximation of phi_hat: mu = phi, piecewise kappa rule.

    kappa = 2 sqrt(N rho^2) when N rho^2 <= 1, else 2 N rho^2; the branches
    agree at N rho^2 = 1.  rho = 0 is the uniform (degenerate) case.
    """
    n = _check_count(n, 1)
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    if rho == 0.0:
        raise DegenerateDistributionError(
            "phi_hat is uniform at rho = 0; no von Mises fit exists")
    nr2 = n * rho * rho
    kappa = 2.0 * math.sqrt(nr2) if nr2 <= 1.0 else 2.0 * nr2
    return VonMisesParams(mu=phi, kappa=kappa)


def pdf_von_mises(theta: float, p: VonMisesParams) -> float:
    """Von Mises density exp(kappa cos(theta - mu)) / (2 pi I0(kappa))."""
    ln_pdf = (p.kappa * math.cos(theta - p.mu) - math.log(2.0 * math.pi)
              - ln_bessel_i(0, p.kappa))
    return math.exp(ln_pdf)


# ---------------------------------------------------------------------------
# D_DN


def _check_ddn_params(sigma1: float, sigma2: float, rho: float, n: int) -> int:
    n = _check_count(n, 1)
    if not (sigma1 > 0 and sigma2 > 0):
        raise ParameterError(f"sigmas must be > 0, got ({sigma1}, {sigma2})")
    if not (0.0 <= rho < 1.0):
        raise ParameterError(f"rho must be in [0, 1), got {rho}")
    return n


def pdf_ddn_exact(x: float, sigma1: float, sigma2: float, rho: float, n: int) -> float:
    """Exact density of D_DN in terms of x_tilde = 2x/(sigma1 sigma2).

    8 x_tilde^N K_{N-1}(2 x_tilde / (1-rho^2)) I0(2 rho x_tilde / (1-rho^2))
    / (sigma1 sigma2 (1-rho^2) Gamma(N)), combined in log domain.
    """
    n = _check_ddn_params(sigma1, sigma2, rho, n)
    if x <= 0.0:
        return 0.0
    ss = sigma1 * sigma2
    xt = 2.0 * x / ss
    u = 2.0 * xt / (1.0 - rho * rho)
    ln_pdf = (math.log(8.0) - math.log(ss) - math.log1p(-rho * rho) - ln_gamma(n)
              + n * math.log(xt) + ln_bessel_k(n - 1, u) + ln_bessel_i(0, rho * u))
    return math.exp(ln_pdf)


def cdf_ddn_exact(x: float, sigma1: float, sigma2: float, rho: float, n: int) -> float:
    """CDF of D_DN: one minus the Bessel series tail.

    F = 1 - (2 x_tilde^N / Gamma(N)) sum_m rho^m K_{N+m}(u) I_m(rho u) with
    u = 2 x_tilde / (1-rho^2).  Terms are accumulated in log domain with a
    running rescale; the sum stops after a term's relative contribution
    stays below 1e-14 for three consecutive terms, and raises
    SeriesConvergenceError at the term cap.  Collapses to the m = 0 term
    when rho = 0.
    """
    n = _check_ddn_params(sigma1, sigma2, rho, n)
    if x <= 0.0:
        return 0.0
    xt = 2.0 * x / (sigma1 * sigma2)
    u = 2.0 * xt / (1.0 - rho * rho)
    if rho == 0.0:
        ln_sum = ln_bessel_k(n, u)
    else:
        ln_rho = math.log(rho)
        scale = -math.inf
        acc = 0.0
        consecutive_small = 0
        for m in range(_DDN_SERIES_MAX_TERMS):
            ln_term = m * ln_rho + ln_bessel_k(n + m, u) + ln_bessel_i(m, rho * u)
            if ln_term > scale:
                acc = acc * math.exp(scale - ln_term) + 1.0
                scale = ln_term
            else:
                acc += math.exp(ln_term - scale)
            if math.exp(ln_term - scale) < _DDN_SERIES_RTOL * acc:
                consecutive_small += 1
                if consecutive_small >= 3:
                    break
            else:
                consecutive_small = 0
        else:
            raise SeriesConvergenceError(
                f"D_DN CDF series hit {_DDN_SERIES_MAX_TERMS} terms at x={x}, rho={rho}, n={n}")
        ln_sum = scale + math.log(acc)
    ln_tail = math.log(2.0) + n * math.log(xt) - ln_gamma(n) + ln_sum
    if ln_tail <= 0.0:
        return -math.expm1(ln_tail)
    if ln_tail < 1e-8:
        return 0.0
    raise SeriesConvergenceError(
        f"D_DN CDF tail exceeded 1 (ln={ln_tail:.3e}) at x={x}, rho={rho}, n={n}")


def rice_approx_for_ddn(sigma1: float, sigma2: float, rho: float, n: int) -> RiceParams:
    """Rice approximation of D_DN: alpha = (N/2) rho s1 s2, beta = sqrt(N/8) s1 s2.

    Accurate for large N and small rho; reduces to a Rayleigh distribution
    with scale sigma1 sigma2 sqrt(N/8) at rho = 0.
    """
    n = _check_ddn_params(sigma1, sigma2, rho, n)
    ss = sigma1 * sigma2
    return RiceParams(alpha=n / 2.0 * rho * ss, beta=math.sqrt(n / 8.0) * ss)


# ---------------------------------------------------------------------------
# Tagged distribution specs and total variation distance

_FAMILY_FIELDS: Mapping[str, tuple[str, ...]] = {
    "sigma-exact": ("sigma", "n"),
    "rho-exact": ("rho", "n"),
    "phi-exact": ("rho", "phi", "n"),
    "ddn-exact": ("sigma1", "sigma2", "rho", "n"),
    "rice": ("alpha", "beta"),
    "von-mises": ("mu", "kappa"),
    "rayleigh": ("scale",),
}

_CIRCULAR_FAMILIES = frozenset({"phi-exact", "von-mises"})


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    """A tagged distribution family with its parameter record.

    Families: sigma-exact, rho-exact, phi-exact, ddn-exact, rice, von-mises,
    rayleigh.  Parameters are validated at construction against the same
    domains the evaluators enforce (e.g. rho-exact needs N > 2, rho < 1).
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in _FAMILY_FIELDS:
            raise ParameterError(
                f"unknown family {self.family!r}; expected one of {sorted(_FAMILY_FIELDS)}")
        expected = _FAMILY_FIELDS[self.family]
        got = set(self.params)
        if got != set(expected):
            raise ParameterError(
                f"family {self.family!r} needs params {sorted(expected)}, got {sorted(got)}")
        clean = {k: float(self.params[k]) for k in expected}
        object.__setattr__(self, "params", MappingProxyType(clean))
        self.pdf(self._probe_point())  # validates parameter domains eagerly

    def _probe_point(self) -> float:
        return 0.5 if not self.is_circular() else 0.0

    def is_circular(self) -> bool:
        return self.family in _CIRCULAR_FAMILIES

    def domain(self) -> tuple[float, float]:
        """Natural support: one period for circular families, else [lo, inf)/[0,1]."""
        p = self.params
        if self.family == "phi-exact":
            return (p["phi"] - math.pi, p["phi"] + math.pi)
        if self.family == "von-mises":
            return (p["mu"] - math.pi, p["mu"] + math.pi)
        if self.family == "rho-exact":
            return (0.0, 1.0)
        return (0.0, math.inf)

    def pdf(self, x: float) -> float:
        p = self.params
        if self.family == "sigma-exact":
            return pdf_sigma_hat(x, p["sigma"], int(p["n"]))
        if self.family == "rho-exact":
            return pdf_rho_hat_exact(x, p["rho"], int(p["n"]))
        if self.family == "phi-exact":
            return pdf_phi_hat_exact(x, p["rho"], p["phi"], int(p["n"]))
        if self.family == "ddn-exact":
            return pdf_ddn_exact(x, p["sigma1"], p["sigma2"], p["rho"], int(p["n"]))
        if self.family == "rice":
            return pdf_rice(x, RiceParams(alpha=p["alpha"], beta=p["beta"]))
        if self.family == "von-mises":
            return pdf_von_mises(x, VonMisesParams(mu=p["mu"], kappa=p["kappa"]))
        return pdf_rayleigh(x, p["scale"])


_TVD_QUADRATURE = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-7, max_subdivisions=10**6)


def total_variation_distance(f: DistributionSpec, g: DistributionSpec,
                             domain: tuple[float, float] | None = None,
                             spec: QuadratureSpec = _TVD_QUADRATURE) -> float:
    """Half the integrated absolute difference between two densities.

    Circular families integrate over one period centered on f's location so
    the mode stays interior; linear families integrate over [0, inf) by
    default.  Circular and linear families cannot be mixed.
    """
    if f.is_circular() != g.is_circular():
        raise ParameterError("cannot mix circular and linear families in a TVD")
    if domain is None:
        if f.is_circular():
            domain = f.domain()
        else:
            domain = (0.0, math.inf)
    lo, hi = domain
    value = integrate(lambda x: abs(f.pdf(x) - g.pdf(x)), lo, hi, spec) / 2.0
    return min(max(value, 0.0), 1.0)


def cdf_grid(pdf: Callable[[float], float], lo: float, hi: float,
             points: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative Simpson CDF of a density on a uniform grid.

    Returns (xs, cdf) with cdf[0] = 0; each panel uses the Simpson rule with
    the panel midpoint.  Intended for fast sup-deviation comparisons against
    empirical CDFs.
    """
    if points < 2:
        raise ParameterError("cdf_grid needs at least 2 points")
    xs = np.linspace(lo, hi, points)
    mids = (xs[:-1] + xs[1:]) / 2.0
    f_nodes = np.array([pdf(float(x)) for x in xs])
    f_mids = np.array([pdf(float(m)) for m in mids])
    panels = np.diff(xs) / 6.0 * (f_nodes[:-1] + 4.0 * f_mids + f_nodes[1:])
    return xs, np.concatenate([[0.0], np.cumsum(panels)])
