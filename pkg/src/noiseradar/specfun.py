"""Special functions and quadrature used by the exact sampling distributions.

The Gauss hypergeometric series, the Marcum Q-function, and modified Bessel
functions in both plain and log form are collected here, together with an
adaptive integrator.  Everything that can overflow in the distribution
formulas (Gamma(N), (1-rho^2)^N, x^N, K_{N-1}(x)) has a log-domain entry
point so callers can combine factors before exponentiating.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sc

from .errors import ParameterError, QuadratureError, SeriesConvergenceError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "ln_gamma",
    "gauss_2f1",
    "ln_gauss_2f1",
    "bessel_i",
    "ln_bessel_i",
    "bessel_k",
    "ln_bessel_k",
    "marcum_q1",
    "integrate",
]

LN_MAX_DOUBLE = math.log(sys.float_info.max)  # ~709.78
_SERIES_RTOL = 1e-14
_SERIES_MAX_TERMS = 10**6
_BLOCK = 256


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration policy: method, tolerances, and a subdivision budget."""

    method: str = "adaptive-simpson"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 10**6

    def __post_init__(self) -> None:
        if self.method not in ("adaptive-simpson", "gauss-legendre"):
            raise ParameterError(f"unknown quadrature method {self.method!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ParameterError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ParameterError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0:
        raise ParameterError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gauss_2f1(a: float, b: float, c: float, z: float,
              rel_tol: float = _SERIES_RTOL, max_terms: int = _SERIES_MAX_TERMS) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) by its defining series on [0, 1).

    The running term follows the ratio recurrence
    t_{k+1} = t_k * (a+k)(b+k) z / ((c+k)(k+1)); summation stops once
    |t_k| < rel_tol * |sum|.  Slow convergence near z -> 1 (the a+b-c > 0
    case) or overflow of the partial sum raises SeriesConvergenceError so
    callers can exclude the endpoint.
    """
    if not (0.0 <= z < 1.0):
        raise ParameterError(f"series requires 0 <= z < 1, got z={z}")
    if c <= 0 and c == int(c):
        raise ParameterError(f"c must not be a nonpositive integer, got {c}")
    if z == 0.0:
        return 1.0
    total = 1.0
    term = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) * z / ((c + k) * (k + 1.0))
        total += term
        if not math.isfinite(total):
            raise SeriesConvergenceError(
                f"2F1 series overflowed at ({a}, {b}; {c}; {z}); use ln_gauss_2f1")
        if abs(term) < rel_tol * abs(total):
            return total
    raise SeriesConvergenceError(
        f"2F1 series did not converge within {max_terms} terms at ({a}, {b}; {c}; {z})")


def ln_gauss_2f1(a: float, b: float, c: float, z: float,
                 rel_tol: float = _SERIES_RTOL, max_terms: int = _SERIES_MAX_TERMS) -> float:
    """log(2F1(a, b; c; z)) for a, b, c > 0 and z in [0, 1).

    All series terms are positive in this regime, so the sum can be carried
    with a floating mantissa plus a log-scale offset and never overflows.
    The term ratio decreases monotonically toward z for the parameter
    families used here, which gives a geometric tail bound for the stopping
    rule.
    """
    if not (a > 0 and b > 0 and c > 0):
        raise ParameterError("ln_gauss_2f1 requires a, b, c > 0")
    if not (0.0 <= z < 1.0):
        raise ParameterError(f"series requires 0 <= z < 1, got z={z}")
    if z == 0.0:
        return 0.0
    scale = 0.0     # log scale of the accumulated sum
    acc = 1.0       # partial sum / exp(scale); starts at the k = 0 term
    ln_carry = 0.0  # log of the current term
    k = 0
    while k < max_terms:
        ks = np.arange(k, k + _BLOCK, dtype=float)
        ln_ratios = np.log((a + ks) * (b + ks) * z / ((c + ks) * (ks + 1.0)))
        ln_terms = ln_carry + np.cumsum(ln_ratios)
        block_scale = max(float(ln_terms.max()), scale)
        acc = acc * math.exp(scale - block_scale) + float(np.exp(ln_terms - block_scale).sum())
        scale = block_scale
        ln_carry = float(ln_terms[-1])
        k += _BLOCK
        r = math.exp(float(ln_ratios[-1]))
        if r < 1.0 and math.exp(ln_carry - scale) * r / (1.0 - r) < rel_tol * acc:
            return scale + math.log(acc)
    raise SeriesConvergenceError(
        f"2F1 series did not converge within {max_terms} terms at ({a}, {b}; {c}; {z})")


def ln_bessel_i(order: int, x: float) -> float:
    """log(I_order(x)) for integer order >= 0 and x >= 0 (-inf when I = 0)."""
    _check_bessel_order(order)
    if x < 0:
        raise ParameterError(f"ln_bessel_i requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0 if order == 0 else -math.inf
    scaled = float(_sc.ive(order, x))
    if scaled > 0.0:
        return math.log(scaled) + x
    # ive underflows for large order with small argument; fall back to the
    # leading series term (x/2)^m / m! with its first correction.
    return (order * math.log(x / 2.0) - math.lgamma(order + 1.0)
            + math.log1p(x * x / (4.0 * (order + 1.0))))


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, integer order >= 0.

    Raises OverflowError once the value exceeds double range (x beyond
    roughly 700 for small orders); use ln_bessel_i there.
    """
    ln_val = ln_bessel_i(order, x)
    if ln_val > LN_MAX_DOUBLE:
        raise OverflowError(f"I_{order}({x}) overflows double precision; use ln_bessel_i")
    return math.exp(ln_val)


def ln_bessel_k(order: int, x: float) -> float:
    """log(K_order(x)) for integer order >= 0 and x > 0.

    Uses the exponentially scaled library evaluation where it is finite.
    For small x with large order, K overflows double range; there the value
    is recovered from the integral representation
    K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt evaluated in a shifted
    log domain, which stays accurate at any magnitude.
    """
    _check_bessel_order(order)
    if not x > 0:
        raise ParameterError(f"ln_bessel_k requires x > 0, got {x}")
    scaled = float(_sc.kve(order, x))
    if math.isfinite(scaled):
        return math.log(scaled) - x
    return _ln_bessel_k_integral(order, x)


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function of the second kind, integer order >= 0.

    Overflow (tiny x with large order) raises OverflowError rather than
    saturating; use ln_bessel_k there.
    """
    ln_val = ln_bessel_k(order, x)
    if ln_val > LN_MAX_DOUBLE:
        raise OverflowError(f"K_{order}({x}) overflows double precision; use ln_bessel_k")
    return math.exp(ln_val)


def _ln_cosh(y: float) -> float:
    y = abs(y)
    return y + math.log1p(math.exp(-2.0 * y)) - math.log(2.0)


def _ln_bessel_k_integral(order: int, x: float) -> float:
    def ln_f(t: float) -> float:
        return -x * math.cosh(t) + _ln_cosh(order * t)

    t_peak = math.asinh(order / x) if order > 0 else 0.0
    peak = ln_f(t_peak)
    t_hi = t_peak + 1.0
    while ln_f(t_hi) > peak - 60.0:
        t_hi += 1.0
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=10**6)
    shifted = integrate(lambda t: math.exp(ln_f(t) - peak), 0.0, t_hi, spec)
    return peak + math.log(shifted)


def _check_bessel_order(order: int) -> None:
    if order != int(order) or order < 0:
        raise ParameterError(f"Bessel order must be a nonnegative integer, got {order}")


def marcum_q1(a: float, b: float) -> float:
    """Marcum Q-function of order 1: the Rice(a, 1) survival at b.

    Q1(a, b) = P(X > b^2) for X noncentral chi-squared with 2 degrees of
    freedom and noncentrality a^2, evaluated through the library's stable
    noncentral chi-squared CDF.  Monotone nonincreasing in b, nondecreasing
    in a.
    """
    if a < 0 or b < 0:
        raise ParameterError(f"marcum_q1 requires a, b >= 0, got ({a}, {b})")
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return math.exp(-b * b / 2.0)
    q = 1.0 - float(_sc.chndtr(b * b, 2.0, a * a))
    return min(max(q, 0.0), 1.0)


def integrate(f: Callable[[float], float], lo: float, hi: float,
              spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Definite integral of f over [lo, hi] to the spec's tolerances.

    hi may be +inf, in which case the tail is folded onto [0, 1) with the
    substitution x = lo + u/(1-u); the integrand must decay there.  Exceeding
    the subdivision budget raises QuadratureError.
    """
    if lo == hi:
        return 0.0
    if lo > hi:
        return -integrate(f, hi, lo, spec)
    if math.isinf(hi):
        if math.isinf(lo):
            raise ParameterError("doubly infinite intervals are not supported")
        base = lo

        def folded(u: float) -> float:
            if u >= 1.0:
                return 0.0
            w = 1.0 - u
            return f(base + u / w) / (w * w)

        return integrate(folded, 0.0, 1.0, spec)
    if spec.method == "gauss-legendre":
        return _gauss_legendre(f, lo, hi, spec)
    return _adaptive_simpson(f, lo, hi, spec)


_INITIAL_PANELS = 64


def _adaptive_simpson(f, lo, hi, spec: QuadratureSpec) -> float:
    # Stratify before adapting: sharply peaked integrands (narrow densities)
    # would otherwise look identically zero to the first coarse estimates.
    edges = np.linspace(lo, hi, _INITIAL_PANELS + 1)
    values = [f(float(x)) for x in edges]
    panels = []
    for i in range(_INITIAL_PANELS):
        a, b = float(edges[i]), float(edges[i + 1])
        fa, fb = values[i], values[i + 1]
        fm = f(0.5 * (a + b))
        panels.append((a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)))
    whole = sum(p[5] for p in panels)
    tol = max(spec.abs_tol, spec.rel_tol * abs(whole)) / _INITIAL_PANELS
    # Stack entries: (a, b, fa, fm, fb, simpson_estimate, tolerance)
    stack = [p + (tol,) for p in panels]
    total = 0.0
    splits = 0
    while stack:
        a, b, fa, fm, fb, s, tol = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        s_left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        s_right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = s_left + s_right - s
        if abs(delta) <= 15.0 * tol or (b - a) <= abs(m) * 1e-14:
            total += s_left + s_right + delta / 15.0
            continue
        splits += 1
        if splits > spec.max_subdivisions:
            raise QuadratureError(
                f"adaptive Simpson exceeded {spec.max_subdivisions} subdivisions on [{lo}, {hi}]")
        half = 0.5 * tol
        stack.append((a, m, fa, flm, fm, s_left, half))
        stack.append((m, b, fm, frm, fb, s_right, half))
    return total


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _gauss_legendre(f, lo, hi, spec: QuadratureSpec) -> float:
    def composite(panels: int) -> float:
        edges = np.linspace(lo, hi, panels + 1)
        acc = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            acc += half * sum(w * f(mid + half * t) for t, w in zip(_GL_NODES, _GL_WEIGHTS))
        return acc

    previous = composite(1)
    panels = 2
    while panels <= spec.max_subdivisions:
        current = composite(panels)
        if abs(current - previous) <= max(spec.abs_tol, spec.rel_tol * abs(current)):
            return current
        previous = current
        panels *= 2
    raise QuadratureError(
        f"Gauss-Legendre refinement exceeded {spec.max_subdivisions} panels on [{lo}, {hi}]")
