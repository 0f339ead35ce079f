"""
Coherent states (CS) and two-branch superpositions (SCS) on the Möbius strip.

A CS is labelled by the effective level l' and the strip angle phi:

    |l', phi> = sum_j e^{(l' - i phi) j} e^{-j^2/2} |j>,   xi = e^{-l' + i phi}.

Superpositions are kept unnormalized, exactly as they are written down; fidelity
and moments normalize internally.
"""

import math
from enum import StrEnum
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from errors import ArgumentError, UndefinedMomentsError
from fock import (
    DEFAULT_EPSILON_TAIL,
    DEFAULT_PADDING,
    FockState,
    inner_product,
    ladder_X,
    norm2,
    settle,
    superpose,
)
from geometry import StripConfig, level_at
from latticesum import gauss_comb, unit_sum
from logger import get_logger

logger = get_logger(__name__)

MAX_EPSILON_TAIL = 1e-6
CHI_FOLLOWS_PHI = "phi"

ChiRule = float | Literal["phi"]


class StateKind(StrEnum):
    CS = "cs"
    OPPOSITE_ANGLE = "scs-angle"
    OPPOSITE_XI = "scs-xi"
    OPPOSITE_XI_MINUS = "scs-xi-minus"


SCS_KINDS = frozenset(
    {StateKind.OPPOSITE_ANGLE, StateKind.OPPOSITE_XI, StateKind.OPPOSITE_XI_MINUS}
)


class CSParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    l_prime: float
    phi: float = 0.0
    epsilon_tail: float = DEFAULT_EPSILON_TAIL

    @field_validator("l_prime", "phi")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coherent-state labels must be finite")
        return value

    @field_validator("epsilon_tail")
    @classmethod
    def _tail_range(cls, value: float) -> float:
        if not 0.0 < value <= MAX_EPSILON_TAIL:
            raise ValueError(f"epsilon_tail must lie in (0, {MAX_EPSILON_TAIL}]")
        return value

    @property
    def xi(self) -> complex:
        modulus = math.exp(-self.l_prime)
        return complex(modulus * math.cos(self.phi), modulus * math.sin(self.phi))


class SCSpec(BaseModel):
    """
    Two-branch superposition.

    chi is the relative phase of the second branch (radians):
    scs-angle     |l', phi> + e^{-i chi} |l', -phi>
    scs-xi        |xi> + e^{i chi} |-xi>
    scs-xi-minus  |xi> - e^{i chi} |-xi>
    """

    model_config = ConfigDict(frozen=True)

    kind: StateKind
    base: CSParams
    chi: float = 0.0

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.kind not in SCS_KINDS:
            raise ValueError(f"'{self.kind}' is not a superposition kind")
        if not math.isfinite(self.chi):
            raise ValueError("superposition phase chi must be finite")
        return self


def default_padding(epsilon_tail: float) -> int:
    return max(DEFAULT_PADDING, math.ceil(math.sqrt(math.log(1.0 / epsilon_tail))) + 2)


def _one_sided_tail(d: float) -> float:
    # sum_{n >= 0} e^{-(d + n)^2} <= e^{-d^2} / (1 - e^{-(2d + 1)}) for d > 0
    return math.exp(-d * d) / -math.expm1(-(2.0 * d + 1.0))


def _cs_tails(l_prime: float, j_lo: int, j_hi: int) -> tuple[float, float]:
    total = gauss_comb(l_prime)
    below = _one_sided_tail(l_prime - (j_lo - 1)) / total
    above = _one_sided_tail(j_hi + 1 - l_prime) / total
    return below, above


def build_cs(p: CSParams, padding: int | None = None, scaled: bool = False) -> FockState:
    """
    Builds |l', phi> on the window [floor(l') - padding, ceil(l') + padding].

    Args:
        p: Coherent-state labels and tail tolerance.
        padding: Window padding reserve; defaults to the smallest value (at least 8)
            that meets p.epsilon_tail.
        scaled: Divide out the peak factor e^{l'^2/2}. Same ray, finite for any l'.

    Returns:
        The truncated state with its relative tail mass recorded.
    """
    pad = default_padding(p.epsilon_tail) if padding is None else padding
    if pad < 0:
        raise ArgumentError(f"window padding must be nonnegative, got {pad}")

    lo = math.floor(p.l_prime) - pad
    hi = math.ceil(p.l_prime) + pad
    j = np.arange(lo, hi + 1, dtype=np.float64)
    if scaled:
        real_part = -((j - p.l_prime) ** 2) / 2.0
    else:
        real_part = p.l_prime * j - j**2 / 2.0
    amps = np.exp(real_part - 1j * p.phi * j)

    tail_lo, tail_hi = _cs_tails(p.l_prime, lo, hi)
    tail = tail_lo + tail_hi
    if tail > p.epsilon_tail:
        logger.warning(
            "CS window [%d, %d] leaves tail %.3e above epsilon_tail %.1e",
            lo,
            hi,
            tail,
            p.epsilon_tail,
        )
    return FockState(lo, amps, tail_lo, tail_hi)


def negate_xi(state: FockState) -> FockState:
    """
    |xi> -> |-xi>. Since -xi = e^{-l' + i(phi + pi)}, the coefficients pick up (-1)^j,
    which is |l', phi + pi> without rounding in the phase.
    """
    signs = np.where(state.indices % 2 == 0, 1.0, -1.0)
    return state.with_amps(state.amps * signs)


def build_scs(spec: SCSpec, padding: int | None = None, scaled: bool = False) -> FockState:
    xi = build_cs(spec.base, padding, scaled)
    phase = complex(math.cos(spec.chi), math.sin(spec.chi))

    if spec.kind is StateKind.OPPOSITE_ANGLE:
        mirrored = build_cs(spec.base.model_copy(update={"phi": -spec.base.phi}), padding, scaled)
        return superpose(xi, mirrored, phase.conjugate())
    if spec.kind is StateKind.OPPOSITE_XI:
        return superpose(xi, negate_xi(xi), phase)
    return superpose(xi, negate_xi(xi), -phase)


def build_state(
    kind: StateKind,
    l_prime: float,
    phi: float,
    chi: float = 0.0,
    epsilon_tail: float = DEFAULT_EPSILON_TAIL,
    padding: int | None = None,
    scaled: bool = False,
) -> FockState:
    base = CSParams(l_prime=l_prime, phi=phi, epsilon_tail=epsilon_tail)
    if kind is StateKind.CS:
        return build_cs(base, padding, scaled)
    return build_scs(SCSpec(kind=kind, base=base, chi=chi), padding, scaled)


def resolve_chi(chi: ChiRule, phi: float) -> float:
    return phi if chi == CHI_FOLLOWS_PHI else float(chi)


def strip_state(
    config: StripConfig,
    phi: float,
    kind: StateKind = StateKind.CS,
    chi: ChiRule = 0.0,
    epsilon_tail: float = DEFAULT_EPSILON_TAIL,
    padding: int | None = None,
    scaled: bool = False,
) -> FockState:
    """
    State sitting at strip angle phi: l' comes from the geometry, phi enters the
    coefficients directly, and chi may follow phi.
    """
    return build_state(
        kind,
        level_at(config, phi),
        phi,
        resolve_chi(chi, phi),
        epsilon_tail,
        padding,
        scaled,
    )


def norm_closed(l_prime: float) -> float:
    """<xi|xi> = S(1, 2 l')."""
    return unit_sum(2.0 * l_prime).value.real


def overlap_closed(p1: CSParams, p2: CSParams) -> complex:
    """
    <xi_1|xi_2> = S(1, l'_1 + l'_2 + i(phi_1 - phi_2)).

    The phase enters per index, e^{i(phi_1 - phi_2) j}.
    """
    return unit_sum(complex(p1.l_prime + p2.l_prime, p1.phi - p2.phi)).value


def fidelity(a: FockState, b: FockState) -> float:
    if a.is_zero or b.is_zero:
        raise UndefinedMomentsError("fidelity with the zero state is undefined")
    return abs(inner_product(a, b)) ** 2 / (norm2(a) * norm2(b))


def parity_split(state: FockState) -> tuple[FockState, FockState]:
    """
    Splits into even-j and odd-j parts; a part with negligible mass comes back as
    the flagged zero state.
    """
    even_mask = state.indices % 2 == 0
    even = state.with_amps(np.where(even_mask, state.amps, 0))
    odd = state.with_amps(np.where(even_mask, 0, state.amps))
    total = norm2(state)
    return settle(even, total), settle(odd, total)


def ladder_on_scs(
    spec: SCSpec, padding: int | None = None, scaled: bool = False
) -> tuple[FockState, complex]:
    """
    Applies X to |psi_C> = |xi> + e^{i chi}|-xi>.

    Returns:
        (X|psi_C>, xi); the result equals xi times the minus-branch state.
    """
    if spec.kind is not StateKind.OPPOSITE_XI:
        raise ArgumentError(f"ladder action is defined for scs-xi states, got '{spec.kind}'")
    return ladder_X(build_scs(spec, padding, scaled)), spec.base.xi


def minus_partner(spec: SCSpec) -> SCSpec:
    return spec.model_copy(update={"kind": StateKind.OPPOSITE_XI_MINUS})
