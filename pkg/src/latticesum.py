"""
Lattice Gaussian sums S(a, beta) = sum_{j in Z} exp(-a j^2 + beta j).

Every Jacobi-theta expression of the coherent-state formulas is written in this
canonical form; the translations used across the package are

    theta_3(l' | i pi)            -> S(1, 2 l')
    theta_3(l' - k/2 | i pi)      -> S(1, 2 l' - k)   (normalized convention)
    Gaussian-completed theta      -> g(c) = exp(-c^2) S(1, 2c)

Sums are evaluated with the peak factor exp(Re(beta)^2 / 4a) kept apart as a log
scale, so l' of order 100 never overflows an intermediate.
"""

import math
from dataclasses import dataclass
from threading import Lock

import numpy as np
from cachetools import LRUCache, cached

from errors import ArgumentError, DomainError
from logger import get_logger

logger = get_logger(__name__)

DEFAULT_EPSILON = 1e-16
WINDOW_MARGIN = 2
MAX_WIDENINGS = 8
# |S| below this fraction of sum |terms| is cancellation, not a value
CANCELLATION_RTOL = 1e-12


@dataclass(frozen=True, slots=True)
class GaussSumSpec:
    a: float
    beta: complex
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"quadratic coefficient must be positive, got {self.a}")
        if not 0.0 < self.epsilon < 1.0:
            raise ArgumentError(f"accuracy target must lie in (0, 1), got {self.epsilon}")
        object.__setattr__(self, "beta", complex(self.beta))


@dataclass(frozen=True, slots=True)
class GaussSumResult:
    """
    S = mantissa * exp(log_scale), with log_scale = Re(beta)^2 / 4a.

    j_lo..j_hi is the summation window of the series that produced the value
    (lattice indices for the direct form, reciprocal indices for the dual form).
    modulus is sum |term| on the same scale. A cancelled sum reports its tail
    bound against modulus, since the mantissa itself is rounding noise.
    """

    mantissa: complex
    log_scale: float
    j_lo: int
    j_hi: int
    tail_bound: float
    modulus: float

    @property
    def cancelled(self) -> bool:
        return abs(self.mantissa) <= CANCELLATION_RTOL * self.modulus

    @property
    def value(self) -> complex:
        # inf once the true modulus leaves double range
        with np.errstate(over="ignore", invalid="ignore"):
            return complex(self.mantissa * np.exp(self.log_scale))

    def log_abs(self) -> float:
        return math.log(abs(self.mantissa)) + self.log_scale

    def ratio(self, other: "GaussSumResult") -> complex:
        """self / other without forming either sum."""
        return self.mantissa / other.mantissa * math.exp(self.log_scale - other.log_scale)


def _reduced_imag(beta: complex) -> float:
    # S(a, beta + 2 pi i) = S(a, beta) exactly
    return math.remainder(beta.imag, 2.0 * math.pi)


def _half_width(a_eff: float, epsilon: float) -> int:
    return math.ceil(math.sqrt(math.log(1.0 / epsilon) / a_eff)) + WINDOW_MARGIN


def _gaussian_tail(a_eff: float, half_width: int) -> float:
    """
    Bound on sum_{|k - k0| > W} exp(-a (k - c)^2) when |k0 - c| <= 1/2.
    """
    d = half_width + 0.5
    return 2.0 * math.exp(-a_eff * d * d) / -math.expm1(-a_eff * (2.0 * d + 1.0))


def _windowed_sum(
    a_eff: float, shift: float, phase_rate: float, prefactor: complex, epsilon: float
) -> tuple[complex, int, int, float, float]:
    """
    prefactor * sum_k exp(-a_eff (k - shift)^2 + i phase_rate k), truncated around round(shift).
    """
    center = round(shift)
    width = _half_width(a_eff, epsilon)
    mantissa = 0j
    modulus = 0.0
    tail = math.inf
    for _ in range(MAX_WIDENINGS):
        k = np.arange(center - width, center + width + 1, dtype=np.float64)
        terms = np.exp(-a_eff * (k - shift) ** 2 + 1j * phase_rate * k)
        mantissa = prefactor * complex(terms.sum())
        modulus = abs(prefactor) * float(np.abs(terms).sum())
        cancelled = abs(mantissa) <= CANCELLATION_RTOL * modulus
        reference = modulus if cancelled else abs(mantissa)
        if reference > 0.0:
            tail = abs(prefactor) * _gaussian_tail(a_eff, width) / reference
        if tail <= epsilon:
            break
        logger.debug("Widening lattice window to %d (tail %.3e)", 2 * width, tail)
        width *= 2
    else:
        logger.warning("Lattice sum tail %.3e stays above target %.1e", tail, epsilon)
    return mantissa, center - width, center + width, tail, modulus


@cached(cache=LRUCache(maxsize=8192), lock=Lock())
def gauss_sum_direct(spec: GaussSumSpec) -> GaussSumResult:
    """
    Direct summation over the lattice, peak-factored.
    """
    re_beta, im_beta = spec.beta.real, _reduced_imag(spec.beta)
    mantissa, lo, hi, tail, modulus = _windowed_sum(
        a_eff=spec.a,
        shift=re_beta / (2.0 * spec.a),
        phase_rate=im_beta,
        prefactor=1.0 + 0j,
        epsilon=spec.epsilon,
    )
    result = GaussSumResult(mantissa, re_beta**2 / (4.0 * spec.a), lo, hi, tail, modulus)
    if result.cancelled:
        logger.debug("S(%g, %s) cancels to rounding level", spec.a, spec.beta)
    return result


@cached(cache=LRUCache(maxsize=8192), lock=Lock())
def gauss_sum_poisson(spec: GaussSumSpec) -> GaussSumResult:
    """
    Poisson-dual series

        S(a, beta) = exp(beta^2 / 4a) sqrt(pi / a) sum_k exp(-pi^2 k^2 / a) exp(-i pi k beta / a),

    regrouped so the real exponent peaks at k = Im(beta) / 2 pi and the common
    factor exp(Re(beta)^2 / 4a) matches the direct form.
    """
    a = spec.a
    re_beta, im_beta = spec.beta.real, _reduced_imag(spec.beta)
    prefactor = math.sqrt(math.pi / a) * complex(
        math.cos(re_beta * im_beta / (2.0 * a)), math.sin(re_beta * im_beta / (2.0 * a))
    )
    mantissa, lo, hi, tail, modulus = _windowed_sum(
        a_eff=math.pi**2 / a,
        shift=im_beta / (2.0 * math.pi),
        phase_rate=-math.pi * re_beta / a,
        prefactor=prefactor,
        epsilon=spec.epsilon,
    )
    return GaussSumResult(mantissa, re_beta**2 / (4.0 * a), lo, hi, tail, modulus)


def unit_sum(beta: complex) -> GaussSumResult:
    """S(1, beta) at the default accuracy."""
    return gauss_sum_direct(GaussSumSpec(1.0, beta))


def gauss_comb(c: float) -> float:
    """
    g(c) = sum_j exp(-(j - c)^2) = exp(-c^2) S(1, 2c).

    The argument is reduced to its fractional part first, so g(c + 1) == g(c)
    up to the rounding of c itself.
    """
    frac = c - math.floor(c)
    return unit_sum(2.0 * frac).mantissa.real


def relative_deviation(reference: GaussSumResult, other: GaussSumResult) -> float:
    """
    |reference - other| / |reference|, or over the term-modulus scale of reference
    when reference cancels to zero.
    """
    aligned = other.mantissa * math.exp(other.log_scale - reference.log_scale)
    scale = reference.modulus if reference.cancelled else abs(reference.mantissa)
    return abs(reference.mantissa - aligned) / scale
