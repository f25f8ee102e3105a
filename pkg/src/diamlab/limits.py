"""Closed-form limit laws and constants for the scaled diameter deficit.

Everything here is a pure function.  The special functions (log-gamma,
regularized incomplete beta) are self-contained so that the constants below
do not silently inherit their accuracy from an external library.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from diamlab.errors import NumericalError

logger = logging.getLogger(__name__)

ZETA2 = math.pi * math.pi / 6.0  # sum of 1/i^2

# ---------------------------------------------------------------------------
# special functions

# Lanczos approximation, g = 7, 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise ValueError("log_gamma requires x > 0")
    if x < 0.5:
        # reflection keeps the series argument away from the poles
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEFS[0]
    for i in range(1, len(_LANCZOS_COEFS)):
        acc += _LANCZOS_COEFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < 1e-15:
            return h
    raise NumericalError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        log_gamma(a + b)
        - log_gamma(a)
        - log_gamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def spherical_cap_fraction(d: int, angle: float) -> float:
    """Area of a spherical cap of the given polar angle over the sphere area.

    The cap {u in S^(d-1): angle(u, c) <= angle}; fraction 1/2 at angle pi/2,
    1 at angle pi.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0.0 <= angle <= math.pi:
        raise ValueError("cap angle must lie in [0, pi]")
    s2 = math.sin(angle) ** 2
    half = 0.5 * regularized_incomplete_beta(0.5 * (d - 1), 0.5, s2)
    if angle <= 0.5 * math.pi:
        return half
    return 1.0 - half


# ---------------------------------------------------------------------------
# exponents and scale constants


def gamma_exponent(d: int, alpha: float) -> float:
    """Tail exponent (d - 1)/2 + 2*alpha driving the n^(2/gamma) scaling."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return 0.5 * (d - 1) + 2.0 * alpha


def zeta_tail_constant(d: int) -> float:
    """The constant 2^(d-1) Gamma(d/2) / ((d-1) sqrt(pi) Gamma((d-1)/2)).

    Governs the tail of the interpoint distance near 2 for points on the
    sphere; equals 2/pi at d=2 and exactly 1 at d=3.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    ln = (
        (d - 1) * math.log(2.0)
        + log_gamma(0.5 * d)
        - math.log(d - 1.0)
        - 0.5 * math.log(math.pi)
        - log_gamma(0.5 * (d - 1))
    )
    return math.exp(ln)


def sigma0_spherical(
    d: int, alpha: float, a: float, boundary_atom: bool = False
) -> float:
    """Scale constant for spherically symmetric laws with radial CDF ~ a*s^alpha.

    boundary_atom selects the branch where the norm equals 1 with probability
    a > 0, in which case alpha is irrelevant and sigma0 = a^2 * c.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    c = zeta_tail_constant(d)
    if boundary_atom:
        return a * a * c
    if alpha <= 0:
        raise ValueError(
            "alpha must be positive without a boundary atom "
            "(the continuous branch degenerates at alpha = 0)"
        )
    ln_ratio = (
        2.0 * math.log(alpha)
        + 2.0 * log_gamma(alpha)
        + log_gamma(0.5 * (d + 1))
        - log_gamma(2.0 * alpha + 0.5 * (d + 1))
    )
    return a * a * c * math.exp(ln_ratio)


def sigma0_sector(
    d: int, alpha: float, a: float, cap_angle: float, boundary_atom: bool = False
) -> float:
    """Scale constant when the support is cut down to a symmetric sector.

    The full-sphere constant multiplied by the area fraction of one spherical
    cap of the sector's half-angle.
    """
    if not 0.0 < cap_angle <= math.pi:
        raise ValueError("cap angle must lie in (0, pi]")
    full = sigma0_spherical(d, alpha, a, boundary_atom)
    return full * spherical_cap_fraction(d, cap_angle)


def sigma0_circle_density(
    density: Callable[[np.ndarray], np.ndarray], n_nodes: int = 4096
) -> float:
    """4 * integral of f(u) f(u + pi) du over [0, 2pi) by periodic trapezoid.

    density must be vectorized over angles and 2pi-periodic.
    """
    u = np.linspace(0.0, 2.0 * math.pi, n_nodes, endpoint=False)
    f = np.asarray(density(u), dtype=np.float64)
    f_op = np.asarray(density((u + math.pi) % (2.0 * math.pi)), dtype=np.float64)
    if np.any(f < 0) or np.any(f_op < 0):
        raise ValueError("density is negative at a quadrature node")
    # periodic trapezoid rule: mean of the integrand times the period
    return float(4.0 * (f * f_op).mean() * 2.0 * math.pi)


# ---------------------------------------------------------------------------
# limit laws


@dataclass(frozen=True)
class ContinuousLaw:
    """CDF 1 - exp(-sigma0 * t^gamma / 2)."""

    gamma: float
    sigma0: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")


@dataclass(frozen=True, eq=False)
class SegmentsLaw:
    """CDF 1 - exp(-t/2) * prod_i (1 + t*p_i/2) for atom weights p_i.

    truncation records how many leading terms of an infinite family the probs
    array keeps; None for genuinely finite families.
    """

    probs: np.ndarray
    truncation: int | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty vector")
        if np.any(p < 0):
            raise ValueError("probs must be nonnegative")
        total = float(p.sum())
        if self.truncation is None and abs(total - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1")
        if self.truncation is not None and total > 1.0 + 1e-12:
            raise ValueError("truncated probs cannot exceed total mass 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_inverse_square(cls, truncation: int = 10_000) -> "SegmentsLaw":
        """Atom weights proportional to 1/i^2, normalized to total mass 1."""
        if truncation < 1:
            raise ValueError("truncation must be at least 1")
        i = np.arange(1, truncation + 1, dtype=np.float64)
        p = (1.0 / ZETA2) / (i * i)
        # dropped mass bounds the CDF truncation error at t by ~ t*tail/2
        tail = 1.0 - float(p.sum())
        logger.debug(
            "inverse-square weights truncated at %d terms; tail mass %.3e",
            truncation,
            tail,
        )
        return cls(p, truncation=truncation)


@dataclass(frozen=True)
class SegmentsZetaLaw:
    """Closed form of the segments law with weights proportional to 1/i^2."""


LimitLaw = Union[ContinuousLaw, SegmentsLaw, SegmentsZetaLaw]

# Below this argument, sinh(x)/x is evaluated by series to avoid 0/0.
_SINHC_SERIES_CUTOFF = 1e-4


def _sinhc(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < _SINHC_SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    out[small] = 1.0 + xs * xs / 6.0 + xs ** 4 / 120.0
    xl = x[~small]
    out[~small] = np.sinh(xl) / xl
    return out


def limit_cdf(law: LimitLaw, t):
    """Evaluate the limit CDF at t (scalar or array); t must be >= 0."""
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise ValueError("the scaled deficit is nonnegative; t must be >= 0")
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)

    if isinstance(law, ContinuousLaw):
        out = -np.expm1(-0.5 * law.sigma0 * t_arr ** law.gamma)
    elif isinstance(law, SegmentsLaw):
        p = law.probs
        if t_arr.size * p.size <= 4_000_000:
            log_prod = np.log1p(0.5 * np.outer(t_arr, p)).sum(axis=1)
        else:
            log_prod = np.array(
                [np.log1p(0.5 * ti * p).sum() for ti in t_arr]
            )
        out = -np.expm1(-0.5 * t_arr + log_prod)
    elif isinstance(law, SegmentsZetaLaw):
        # 1 - exp(-t/2) * (1/pi) sqrt(2*zeta(2)/t) * sinh(pi sqrt(t/(2 zeta(2))))
        # == 1 - exp(-t/2) * sinh(sqrt(3t))/sqrt(3t), continuous at t = 0
        x = np.sqrt(3.0 * t_arr)
        out = -np.expm1(-0.5 * t_arr + np.log(_sinhc(x)))
    else:
        raise TypeError(f"unknown limit law {law!r}")

    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def aprs_envelope(t):
    """Lower and upper bounding CDFs for the d=2 uniform-ball limit.

    (1 - exp(-4 t^(5/2) / (3^(5/2) pi)), 1 - exp(-4 t^(5/2) / pi)) for t > 0.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr <= 0):
        raise ValueError("the envelope is defined for t > 0")
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    tp = t_arr ** 2.5
    lower = -np.expm1(-4.0 * tp / (3.0 ** 2.5 * math.pi))
    upper = -np.expm1(-4.0 * tp / math.pi)
    if scalar:
        return float(lower[0]), float(upper[0])
    return lower, upper
