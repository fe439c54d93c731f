"""Reshaping of unit-cube samples.

Recentering pulls a sample toward the cube centre by composing an inverse
CDF, a scale factor ``lam`` and the Gaussian CDF. The Cauchy flavour swaps
the inverse CDF for the Cauchy quantile, which gives heavier tails once the
sample is mapped to unbounded space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .seeding import as_generator

U_MIN = 1e-12

NORMAL = "normal"
CAUCHY = "cauchy"
DISTRIBUTIONS = (NORMAL, CAUCHY)

UNIT_CUBE = "cube"
UNBOUNDED = "unbounded"
TARGETS = (UNIT_CUBE, UNBOUNDED)

OPPOSITE = "opposite"
QUASI_OPPOSITE = "quasi"
OPPOSITIONS = (None, OPPOSITE, QUASI_OPPOSITE)


@dataclass(frozen=True)
class ReshapeSpec:
    """How a unit-cube sample is reshaped and where it ends up.

    ``lam=None`` means the scale is picked by :func:`meta_lambda` once the
    budget and dimension are known.
    """

    distribution: str = NORMAL
    lam: float | None = 1.0
    target: str = UNIT_CUBE
    middle_point: bool = False
    opposition: str | None = None
    rescale: bool = False

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.opposition not in OPPOSITIONS:
            raise ValueError(f"unknown opposition mode {self.opposition!r}")
        if self.lam is not None:
            if not math.isfinite(self.lam) or self.lam < 0:
                raise ValueError(f"lambda must be a finite non-negative number, got {self.lam}")
            if self.lam == 0 and self.target != UNIT_CUBE:
                raise ValueError("lambda = 0 is only meaningful on the unit cube")
        if self.rescale and self.target == UNBOUNDED:
            raise ValueError("rescale and unbounded target are mutually exclusive")


def clamp(u, u_min=U_MIN):
    """Clamp into ``[u_min, 1 - u_min]`` so inverse CDFs stay finite."""
    return np.clip(np.asarray(u, dtype=float), u_min, 1.0 - u_min)


def _check_open_unit(u):
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise ValueError("quantile argument must lie in the open interval (0, 1)")
    return u


def normal_cdf(x):
    """Standard Gaussian CDF."""
    return special.ndtr(x)


# Acklam's rational approximation to the normal quantile, |rel err| < 1.2e-9
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _acklam(p):
    x = np.empty_like(p)
    low = p < _P_LOW
    mid = ~low
    if np.any(low):
        q = np.sqrt(-2.0 * np.log(p[low]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[low] = num / den
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = num / den
    return x


def normal_inv_cdf(u):
    """Standard Gaussian quantile.

    Rational approximation followed by one Halley step against the forward
    CDF. The upper half is mirrored onto the lower one, where ``1 - u`` is
    exact, so both tails get the same absolute accuracy.
    """
    u = _check_open_unit(u)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    upper = u > 0.5
    p = np.where(upper, 1.0 - u, u)
    x = _acklam(p)
    err = special.ndtr(x) - p
    step = err * math.sqrt(2.0 * math.pi) * np.exp(0.5 * x * x)
    x = x - step / (1.0 + 0.5 * x * step)
    x = np.where(upper, -x, x)
    x[u == 0.5] = 0.0
    return float(x[0]) if scalar else x


def cauchy_cdf(x):
    return 0.5 + np.arctan(x) / math.pi


def cauchy_inv_cdf(u):
    """Standard Cauchy quantile ``tan(pi (u - 1/2))``."""
    u = _check_open_unit(u)
    out = np.tan(math.pi * (u - 0.5))
    return float(out) if out.ndim == 0 else out


def _quantile(distribution):
    if distribution == NORMAL:
        return normal_inv_cdf
    if distribution == CAUCHY:
        return cauchy_inv_cdf
    raise ValueError(f"unknown distribution {distribution!r}")


def recenter(sample, lam: float, distribution: str = NORMAL, u_min: float = U_MIN):
    """Map each coordinate ``u`` to ``Phi(lam * Q(u))``.

    ``Q`` is the normal or Cauchy quantile. ``lam = 0`` collapses the sample
    onto the centre; ``lam = 1`` with the normal quantile is the identity up to
    clamping.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    u = clamp(sample, u_min)
    if lam == 0:
        return np.full_like(u, 0.5)
    out = normal_cdf(lam * _quantile(distribution)(u))
    # heavy tails saturate the forward CDF at exactly 1.0
    return np.minimum(out, np.nextafter(1.0, 0.0))


def meta_lambda(budget, dimension) -> float:
    """Recentering scale from budget and dimension: ``(1 + ln n) / (4 ln d)``."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if dimension < 2:
        raise ValueError(
            f"automatic lambda needs dimension >= 2 (got {dimension}); supply lambda explicitly"
        )
    return (1.0 + math.log(budget)) / (4.0 * math.log(dimension))


def convert_unbounded(sample, lam: float, distribution: str = NORMAL, u_min: float = U_MIN):
    """Send unit-cube points to R^d as ``lam * Q(u)``."""
    u = clamp(sample, u_min)
    return lam * _quantile(distribution)(u)


def add_middle_point(sample):
    """Replace the first point by the cube centre; the sample size is unchanged."""
    out = np.array(sample, dtype=float, copy=True)
    if out.shape[0] < 1:
        raise ValueError("empty sample")
    out[0] = 0.5
    return out


def oppose(sample, mode: str = OPPOSITE, seed=None, factors=None):
    """Return ``sample`` followed by its (quasi-)opposite points.

    Opposite reflects through the centre (``1 - x``). Quasi-opposite contracts
    the reflection by a fresh uniform ``r`` per point: ``0.5 + r (0.5 - x)``.
    ``factors`` pins the ``r`` values instead of drawing them.
    """
    x = np.asarray(sample, dtype=float)
    if x.shape[0] < 1:
        raise ValueError("opposition needs at least one base point")
    if mode == OPPOSITE:
        mirrored = 1.0 - x
    elif mode == QUASI_OPPOSITE:
        if factors is None:
            factors = as_generator(seed).random(x.shape[0])
        r = np.asarray(factors, dtype=float).reshape(-1, 1)
        mirrored = 0.5 + r * (0.5 - x)
    else:
        raise ValueError(f"unknown opposition mode {mode!r}")
    # 1 - 0 = 1 leaves the half-open cube
    mirrored = np.minimum(mirrored, np.nextafter(1.0, 0.0))
    return np.vstack([x, mirrored])


def rescale_to_bounds(sample, u_min: float = U_MIN):
    """Affinely stretch every column so its min and max hit the cube faces."""
    x = np.asarray(sample, dtype=float)
    if x.shape[0] < 2:
        raise ValueError("rescaling needs at least two points")
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    flat = np.flatnonzero(hi <= lo)
    if flat.size:
        raise ValueError(f"cannot rescale degenerate column(s) {flat.tolist()}: max equals min")
    return clamp((x - lo) / (hi - lo), u_min)
