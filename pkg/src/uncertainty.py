"""
Phase / angular-momentum uncertainty measures for coherent states on the strip.

Closed forms come in two conventions:

normalized    expectation values divided by the CS norm S(1, 2l'), with the theta
              ratios read as S(1, 2l' - k) / S(1, 2l'). Respects unitarity.
paper         the literal prefactors e^{k(l' + i phi) - k^2/2} kept as they stand,
              with the theta ratios read as Gaussian combs g(l' - k/2) / g(l').

All moduli are handled as logarithms so large l' never overflows before the
final exponential.
"""

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import NamedTuple

from errors import ArgumentError
from fock import FockState, moments
from geometry import effective_level
from latticesum import gauss_comb, unit_sum
from logger import get_logger
from states import CSParams, build_cs

logger = get_logger(__name__)

SMALL_ANGLE_THRESHOLD = 0.9
SMALL_ANGLE_TARGET = 0.25
HEISENBERG_SLACK = 1e-12


class Convention(StrEnum):
    NORMALIZED = "normalized"
    PAPER_LITERAL = "paper"


class SumRule(NamedTuple):
    sum: float
    paper_target: float
    deviation: float


class HeisenbergCheck(NamedTuple):
    lhs: float
    rhs: float
    satisfied: bool


class SmallAngleReport(NamedTuple):
    product: float
    valid: bool
    target: float


@dataclass(frozen=True, slots=True)
class UncertaintyReport:
    l_prime: float
    phi: float
    convention: Convention
    d2_J: float  # noqa: N815
    d2_phi: float
    sum: float
    heis_lhs: float
    heis_rhs: float
    heis_satisfied: bool
    small_angle_product: float
    small_angle_valid: bool


def _log_comb_ratio(l_prime: float, shift: float) -> float:
    return math.log(gauss_comb(l_prime - shift)) - math.log(gauss_comb(l_prime))


def _log_abs_phase_moment(l_prime: float, k: int, conv: Convention) -> float:
    """
    ln |<e^{i k phi-hat}>| for k = 1, 2.
    """
    prefactor = k * l_prime - k * k / 2.0
    if conv is Convention.NORMALIZED:
        shifted = unit_sum(2.0 * l_prime - k)
        reference = unit_sum(2.0 * l_prime)
        return prefactor + shifted.log_abs() - reference.log_abs()
    return prefactor + _log_comb_ratio(l_prime, k / 2.0)


def _phase_moment(l_prime: float, phi: float, k: int, conv: Convention) -> complex:
    modulus = math.exp(_log_abs_phase_moment(l_prime, k, conv))
    return complex(modulus * math.cos(k * phi), modulus * math.sin(k * phi))


def expect_U_closed(l_prime: float, phi: float, conv: Convention) -> complex:  # noqa: N802
    """
    <e^{i phi-hat}> on |l', phi>.

    normalized: e^{l' + i phi - 1/2} S(1, 2l' - 1) / S(1, 2l'),
                modulus e^{-1/4} g(l' - 1/2) / g(l').
    paper:      e^{l' + i phi - 1/2} g(l' - 1/2) / g(l').
    """
    return _phase_moment(l_prime, phi, 1, conv)


def expect_U2_closed(l_prime: float, phi: float, conv: Convention) -> complex:  # noqa: N802
    """
    <e^{2i phi-hat}> on |l', phi>; exactly e^{2i phi - 1} in the normalized convention.
    """
    return _phase_moment(l_prime, phi, 2, conv)


def _check_lambda(lam: int) -> None:
    if lam not in (1, -1):
        raise ArgumentError(f"lambda must be +1 or -1, got {lam}")


def _log_expect_exp_j(l_prime: float, lam: int, conv: Convention) -> float:
    _check_lambda(lam)
    if conv is Convention.NORMALIZED:
        return unit_sum(2.0 * (l_prime - lam)).log_abs() - unit_sum(2.0 * l_prime).log_abs()
    return lam * lam - 2.0 * lam * l_prime + _log_comb_ratio(l_prime, lam)


def expect_expJ_closed(l_prime: float, lam: int, conv: Convention) -> float:  # noqa: N802
    """
    <e^{-2 lam J}> on |l', phi>, lam = +-1.

    Both conventions agree: the printed prefactor reduces to e^{lam^2 - 2 lam l'}
    and g is 1-periodic.
    """
    return math.exp(_log_expect_exp_j(l_prime, lam, conv))


def expect_expJ_printed(phi: float, r: float, l: float, lam: int) -> float:  # noqa: E741, N802
    """
    The printed geometric form
    e^{lam^2 - 2 l lam} e^{-2 lam r sin(phi/2)} (1 + r cos(phi/2))^{2 lam} g(l' - lam) / g(l').
    """
    _check_lambda(lam)
    l_prime = effective_level(phi, r, l)
    log_value = (
        lam * lam
        - 2.0 * l * lam
        - 2.0 * lam * r * math.sin(phi / 2.0)
        + 2.0 * lam * math.log1p(r * math.cos(phi / 2.0))
        + _log_comb_ratio(l_prime, lam)
    )
    return math.exp(log_value)


def delta2_J(l_prime: float, conv: Convention) -> float:  # noqa: N802
    """1/4 |ln(<e^{-2J}> <e^{2J}>)|."""
    return 0.25 * abs(_log_expect_exp_j(l_prime, 1, conv) + _log_expect_exp_j(l_prime, -1, conv))


def delta2_phi(l_prime: float, conv: Convention) -> float:
    """1/4 |ln(1 / |<e^{2i phi-hat}>|^2)|."""
    return 0.25 * abs(-2.0 * _log_abs_phase_moment(l_prime, 2, conv))


def sum_rule(l_prime: float, conv: Convention) -> SumRule:
    total = delta2_J(l_prime, conv) + delta2_phi(l_prime, conv)
    return SumRule(sum=total, paper_target=l_prime, deviation=total - l_prime)


def heisenberg_check(state: FockState) -> HeisenbergCheck:
    """
    Var(J) <(Delta U)^dagger (Delta U)> >= 1/4 |<U>|^2 with U = e^{i phi-hat}.

    U is unitary, so the phase spread is 1 - |<U>|^2.
    """
    m = moments(state)
    mod2 = abs(m.exp_U) ** 2
    lhs = m.var_J * (1.0 - mod2)
    rhs = 0.25 * mod2
    return HeisenbergCheck(lhs=lhs, rhs=rhs, satisfied=lhs >= rhs - HEISENBERG_SLACK)


def engine_measures(state: FockState) -> tuple[float, float]:
    """
    Delta^2(J) and Delta^2(phi) from Fock moments, for any nonzero state.
    """
    m = moments(state)
    d2_j = 0.25 * abs(math.log(m.exp_expJ_plus * m.exp_expJ_minus))
    d2_phi = 0.25 * abs(math.log(1.0 / abs(m.exp_U2) ** 2)) if m.exp_U2 != 0 else math.inf
    return d2_j, d2_phi


def minimum_bound_closed(l_prime: float, phi: float, conv: Convention) -> float:
    """1/4 |<e^{i phi-hat}>|^2 from the closed form."""
    return 0.25 * math.exp(2.0 * _log_abs_phase_moment(l_prime, 1, conv))


def small_angle_report(l_prime: float, conv: Convention) -> SmallAngleReport:
    """
    Delta^2(J) Delta^2(phi) against 1/4.

    Reading the U-form bound as a phase-variance bound needs e^{i phi-hat} ~ 1 + i phi-hat;
    the reading is flagged valid only when |<U>|^2 >= SMALL_ANGLE_THRESHOLD on the
    normalized engine.
    """
    product = delta2_J(l_prime, conv) * delta2_phi(l_prime, conv)
    engine = moments(build_cs(CSParams(l_prime=l_prime), scaled=True))
    valid = abs(engine.exp_U) ** 2 >= SMALL_ANGLE_THRESHOLD
    return SmallAngleReport(product=product, valid=valid, target=SMALL_ANGLE_TARGET)


def uncertainty_report(l_prime: float, phi: float, conv: Convention) -> UncertaintyReport:
    d2_j = delta2_J(l_prime, conv)
    d2_phi = delta2_phi(l_prime, conv)
    heis = heisenberg_check(build_cs(CSParams(l_prime=l_prime, phi=phi), scaled=True))
    small = small_angle_report(l_prime, conv)
    return UncertaintyReport(
        l_prime=l_prime,
        phi=phi,
        convention=conv,
        d2_J=d2_j,
        d2_phi=d2_phi,
        sum=d2_j + d2_phi,
        heis_lhs=heis.lhs,
        heis_rhs=heis.rhs,
        heis_satisfied=heis.satisfied,
        small_angle_product=small.product,
        small_angle_valid=small.valid,
    )
