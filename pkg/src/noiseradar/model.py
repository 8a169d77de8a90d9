"""Structured covariance model for noise-type radars.

A noise-type radar measures four real voltage series: the in-phase and
quadrature components of the received signal (I1, Q1) and of the internal
reference signal (I2, Q2).  Under the zero-mean Gaussian model the joint
vector x = [I1, Q1, I2, Q2] is fully described by a 4x4 covariance matrix
parameterized by two amplitudes (sigma1, sigma2), a correlation coefficient
rho in [0, 1], and a phase phi.  The off-diagonal block is rho*sigma1*sigma2
times a reflection matrix (QTMS radar) or a rotation matrix (standard noise
radar).

The component ordering (I1, Q1, I2, Q2) is fixed everywhere, including the
IQ file formats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "RadarVariant",
    "CovarianceParams",
    "IQBatch",
    "SampleStats",
    "wrap_phase",
    "reflection_matrix",
    "rotation_matrix",
    "build_covariance",
    "sample_covariance",
    "auxiliary_stats",
    "stats_from_batch",
]


class RadarVariant(str, enum.Enum):
    """Which phase-coupling matrix the cross-covariance block uses.

    QTMS uses the reflection matrix [[cos, sin], [sin, -cos]] and the sign
    convention Rc = I1*I2 - Q1*Q2, Rs = I1*Q2 + I2*Q1.  Standard noise radar
    uses the rotation matrix [[cos, sin], [-sin, cos]] and Rc = I1*I2 + Q1*Q2,
    Rs = I1*Q2 - I2*Q1.
    """

    QTMS = "qtms"
    STANDARD_NOISE = "noise"


def wrap_phase(phi: float) -> float:
    """Wrap an angle to the interval (-pi, pi]."""
    w = math.remainder(phi, math.tau)
    return math.pi if w <= -math.pi else w


@dataclass(frozen=True)
class CovarianceParams:
    """The four model parameters plus the radar variant.

    sigma1 and sigma2 are nonnegative amplitudes (volts), rho is in [0, 1],
    and phi is normalized to (-pi, pi] at construction.
    """

    sigma1: float
    sigma2: float
    rho: float
    phi: float
    variant: RadarVariant = RadarVariant.QTMS

    def __post_init__(self) -> None:
        if not (self.sigma1 >= 0 and math.isfinite(self.sigma1)):
            raise ParameterError(f"sigma1 must be finite and >= 0, got {self.sigma1}")
        if not (self.sigma2 >= 0 and math.isfinite(self.sigma2)):
            raise ParameterError(f"sigma2 must be finite and >= 0, got {self.sigma2}")
        if not (0.0 <= self.rho <= 1.0):
            raise ParameterError(f"rho must be in [0, 1], got {self.rho}")
        if not math.isfinite(self.phi):
            raise ParameterError(f"phi must be finite, got {self.phi}")
        object.__setattr__(self, "phi", wrap_phase(self.phi))
        object.__setattr__(self, "variant", RadarVariant(self.variant))


def reflection_matrix(phi: float) -> np.ndarray:
    """2x2 reflection matrix [[cos, sin], [sin, -cos]] (QTMS coupling)."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [s, -c]])


def rotation_matrix(phi: float) -> np.ndarray:
    """2x2 rotation matrix [[cos, sin], [-sin, cos]] (standard noise coupling)."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, s], [-s, c]])


def build_covariance(params: CovarianceParams) -> np.ndarray:
    """Assemble the 4x4 structured covariance matrix.

    Diagonal blocks are sigma1^2 * I and sigma2^2 * I; the off-diagonal
    block is rho*sigma1*sigma2 times the variant's coupling matrix.  The
    result is symmetric, positive semidefinite for rho <= 1, and positive
    definite iff rho < 1 and both sigmas are positive.
    """
    if params.variant is RadarVariant.QTMS:
        coupling = reflection_matrix(params.phi)
    else:
        coupling = rotation_matrix(params.phi)
    off = params.rho * params.sigma1 * params.sigma2 * coupling
    top = np.hstack([params.sigma1**2 * np.eye(2), off])
    bottom = np.hstack([off.T, params.sigma2**2 * np.eye(2)])
    return np.vstack([top, bottom])


@dataclass(frozen=True)
class IQBatch:
    """N joint samples of the four voltage series, ordered (I1, Q1, I2, Q2)."""

    i1: np.ndarray
    q1: np.ndarray
    i2: np.ndarray
    q2: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for name in ("i1", "q1", "i2", "q2"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise ParameterError(f"{name} must be one-dimensional")
            arrays[name] = a
        lengths = {a.shape[0] for a in arrays.values()}
        if len(lengths) != 1:
            raise ParameterError(f"channel lengths differ: {sorted(lengths)}")
        if lengths == {0}:
            raise ParameterError("batch must contain at least one sample")
        for name, a in arrays.items():
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.i1.shape[0]

    def as_matrix(self) -> np.ndarray:
        """Stack the channels into an (n, 4) matrix in the fixed ordering."""
        return np.column_stack([self.i1, self.q1, self.i2, self.q2])


@dataclass(frozen=True)
class SampleStats:
    """Sample covariance matrix plus the auxiliary sums the estimators use.

    p1_bar and p2_bar are the sample powers of the two channels; rc_bar and
    rs_bar are the variant-signed cross sums.  rc_bar^2 + rs_bar^2 <=
    p1_bar*p2_bar holds in expectation but is not guaranteed for raw data.
    """

    s_hat: np.ndarray
    n: int
    p1_bar: float
    p2_bar: float
    rc_bar: float
    rs_bar: float
    variant: RadarVariant

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"sample count must be >= 1, got {self.n}")
        s = np.asarray(self.s_hat, dtype=float)
        if s.shape != (4, 4):
            raise ParameterError(f"s_hat must be 4x4, got shape {s.shape}")
        s.flags.writeable = False
        object.__setattr__(self, "s_hat", s)
        object.__setattr__(self, "variant", RadarVariant(self.variant))


def sample_covariance(batch: IQBatch) -> np.ndarray:
    """Sample covariance (1/N) sum x x^T with no mean subtraction.

    The model is zero-mean, so subtracting a sample mean would change the
    estimator distributions.  The result is symmetrized to remove BLAS
    rounding asymmetry.
    """
    x = batch.as_matrix()
    s = x.T @ x / batch.n
    return (s + s.T) / 2.0


def auxiliary_stats(s_hat: np.ndarray, n: int, variant: RadarVariant) -> SampleStats:
    """Extract the auxiliary sums P1_bar, P2_bar, Rc_bar, Rs_bar from s_hat.

    These are sums of the appropriate entries of the sample covariance, with
    the cross-sum signs fixed by the radar variant.
    """
    s = np.asarray(s_hat, dtype=float)
    if s.shape != (4, 4):
        raise ParameterError(f"s_hat must be 4x4, got shape {s.shape}")
    scale = np.max(np.abs(s))
    if not np.allclose(s, s.T, rtol=0.0, atol=1e-9 * max(scale, 1.0)):
        raise ParameterError("s_hat must be symmetric")
    variant = RadarVariant(variant)
    p1 = s[0, 0] + s[1, 1]
    p2 = s[2, 2] + s[3, 3]
    if variant is RadarVariant.QTMS:
        rc = s[0, 2] - s[1, 3]
        rs = s[0, 3] + s[1, 2]
    else:
        rc = s[0, 2] + s[1, 3]
        rs = s[0, 3] - s[1, 2]
    return SampleStats(
        s_hat=s, n=n, p1_bar=float(p1), p2_bar=float(p2),
        rc_bar=float(rc), rs_bar=float(rs), variant=variant,
    )


def stats_from_batch(batch: IQBatch, variant: RadarVariant) -> SampleStats:
    """Convenience pipeline: sample_covariance followed by auxiliary_stats."""
    return auxiliary_stats(sample_covariance(batch), batch.n, variant)
