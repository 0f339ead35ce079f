"""
Truncated angular-momentum (Fock) engine.

A state is a window j_lo..j_hi of complex amplitudes in the basis |j>, j in Z, of
J-hat. The phase operator U = e^{i phi-hat} raises the index, (U psi)_j = psi_{j-1},
so that [J, U] = U. The ladder operator X = e^{i(phi-hat + i J)} is applied in the
disentangled form X = e^{-1/2} U e^{-J}, i.e. X|j> = e^{-(j + 1/2)} |j + 1>.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from errors import ArgumentError, DomainError, UndefinedMomentsError
from logger import get_logger

logger = get_logger(__name__)

DEFAULT_PADDING = 8
DEFAULT_EPSILON_TAIL = 1e-18
# mass ratio below which a combination is settled to the flagged zero state
ZERO_RTOL = 1e-24
VARIANCE_CLAMP = 1e-12

ComplexArray = np.ndarray[Any, np.dtype[np.complex128]]


@dataclass(frozen=True, eq=False)
class FockState:
    """
    Immutable truncated state.

    Args:
        j_lo: Lowest index of the window.
        amps: Amplitudes for j_lo, j_lo + 1, ...; copied and frozen on construction.
        tail_lo: Estimated relative mass below the window.
        tail_hi: Estimated relative mass above the window.
    """

    j_lo: int
    amps: ComplexArray
    tail_lo: float = 0.0
    tail_hi: float = 0.0

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.size == 0:
            raise ArgumentError("a Fock state needs a nonempty one-dimensional window")
        if not np.all(np.isfinite(amps)):
            raise DomainError("Fock amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "j_lo", int(self.j_lo))
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, j: int) -> "FockState":
        return cls(j, np.ones(1, dtype=np.complex128))

    @classmethod
    def zero(cls, j_lo: int, j_hi: int) -> "FockState":
        return cls(j_lo, np.zeros(max(j_hi - j_lo + 1, 1), dtype=np.complex128))

    @property
    def tail_bound(self) -> float:
        return self.tail_lo + self.tail_hi

    def with_amps(self, amps: ComplexArray, shift: int = 0) -> "FockState":
        """Same tails, new amplitudes, window moved by shift."""
        return FockState(self.j_lo + shift, amps, self.tail_lo, self.tail_hi)

    @property
    def j_hi(self) -> int:
        return self.j_lo + self.amps.size - 1

    @property
    def indices(self) -> np.ndarray[Any, np.dtype[np.int64]]:
        return np.arange(self.j_lo, self.j_hi + 1, dtype=np.int64)

    @property
    def is_zero(self) -> bool:
        return not bool(np.any(self.amps))

    def amplitude(self, j: int) -> complex:
        if self.j_lo <= j <= self.j_hi:
            return complex(self.amps[j - self.j_lo])
        return 0j


@dataclass(frozen=True, slots=True)
class MomentSet:
    mean_J: float  # noqa: N815
    mean_J2: float  # noqa: N815
    var_J: float  # noqa: N815
    exp_U: complex  # noqa: N815
    exp_U2: complex  # noqa: N815
    exp_expJ_plus: float  # noqa: N815
    exp_expJ_minus: float  # noqa: N815


def _union(a: FockState, b: FockState) -> tuple[int, ComplexArray, ComplexArray]:
    lo = min(a.j_lo, b.j_lo)
    hi = max(a.j_hi, b.j_hi)
    left = np.zeros(hi - lo + 1, dtype=np.complex128)
    right = np.zeros(hi - lo + 1, dtype=np.complex128)
    left[a.j_lo - lo : a.j_hi - lo + 1] = a.amps
    right[b.j_lo - lo : b.j_hi - lo + 1] = b.amps
    return lo, left, right


def norm2(state: FockState) -> float:
    return float(np.sum(np.abs(state.amps) ** 2))


def inner_product(a: FockState, b: FockState) -> complex:
    """
    <a|b> = sum_j conj(a_j) b_j over the intersection of the two windows.
    """
    lo = max(a.j_lo, b.j_lo)
    hi = min(a.j_hi, b.j_hi)
    if lo > hi:
        return 0j
    return complex(
        np.vdot(a.amps[lo - a.j_lo : hi - a.j_lo + 1], b.amps[lo - b.j_lo : hi - b.j_lo + 1])
    )


def distance(a: FockState, b: FockState) -> float:
    """Euclidean norm of a - b on the union window."""
    _, left, right = _union(a, b)
    return float(np.linalg.norm(left - right))


def settle(state: FockState, reference_norm2: float) -> FockState:
    """
    Replaces state by the flagged zero state when its mass is negligible against reference_norm2.
    """
    if not state.is_zero and norm2(state) <= ZERO_RTOL * reference_norm2:
        return FockState.zero(state.j_lo, state.j_hi)
    return state


def superpose(a: FockState, b: FockState, coeff: complex = 1.0) -> FockState:
    """a + coeff * b on the union window."""
    lo, left, right = _union(a, b)
    combined = FockState(
        lo, left + coeff * right, max(a.tail_lo, b.tail_lo), max(a.tail_hi, b.tail_hi)
    )
    return settle(combined, norm2(a) + abs(coeff) ** 2 * norm2(b))


def scale(state: FockState, factor: complex) -> FockState:
    return state.with_amps(state.amps * factor)


def phase_shift(state: FockState, k: int) -> FockState:
    """
    (U^k psi)_j = psi_{j-k}. The window moves with the amplitudes, so no mass is lost.
    """
    return state.with_amps(state.amps, k)


def apply_J(state: FockState) -> FockState:  # noqa: N802
    return state.with_amps(state.amps * state.indices)


def _grow_tail(tail: float, log_factor: float) -> float:
    if tail <= 0.0:
        return tail
    return math.exp(min(math.log(tail) + log_factor, 0.0))


def scale_exp_J(state: FockState, lam: float) -> FockState:  # noqa: N802
    """
    Multiplies amplitude j by e^{lam j}, in log domain so that a small amplitude
    times a huge factor never overflows on the way.

    Each side's tail estimate is carried over assuming the excluded mass on that
    side sits at the first index beyond the window edge.
    """
    if state.is_zero:
        return state

    j = state.indices.astype(np.float64)
    magnitude = np.abs(state.amps)
    with np.errstate(divide="ignore"):
        log_mag = np.log(magnitude) + lam * j
    phase = np.divide(
        state.amps, magnitude, out=np.zeros_like(state.amps), where=magnitude > 0
    )
    scaled_amps = np.exp(log_mag) * phase

    tail_lo, tail_hi = state.tail_lo, state.tail_hi
    if tail_lo > 0.0 or tail_hi > 0.0:
        new_norm2 = float(np.sum(np.abs(scaled_amps) ** 2))
        log_ratio = math.log(norm2(state)) - math.log(new_norm2) if new_norm2 > 0 else math.inf
        tail_lo = _grow_tail(tail_lo, 2.0 * lam * (state.j_lo - 1) + log_ratio)
        tail_hi = _grow_tail(tail_hi, 2.0 * lam * (state.j_hi + 1) + log_ratio)
    return FockState(state.j_lo, scaled_amps, tail_lo, tail_hi)


def ladder_X(state: FockState) -> FockState:  # noqa: N802
    """X|j> = e^{-(j + 1/2)} |j + 1>."""
    return scale(phase_shift(scale_exp_J(state, -1.0), 1), math.exp(-0.5))


def expect_U_power(state: FockState, k: int) -> complex:  # noqa: N802
    """
    Normalized <psi|U^k|psi> = sum_j conj(c_j) c_{j-k} / sum_j |c_j|^2.
    """
    if state.is_zero:
        raise UndefinedMomentsError("moments of the zero state are undefined")
    if k < 0:
        return expect_U_power(state, -k).conjugate()
    amps = state.amps
    if k >= amps.size:
        return 0j
    return complex(np.vdot(amps[k:], amps[: amps.size - k])) / norm2(state)


def moments(state: FockState) -> MomentSet:
    """
    Normalized expectation values of J, J^2, U, U^2 and e^{+-2J}.
    """
    if state.is_zero:
        raise UndefinedMomentsError("moments of the zero state are undefined")

    amps = state.amps
    j = state.indices.astype(np.float64)
    weights = np.abs(amps) ** 2
    total = float(weights.sum())
    probs = weights / total

    mean_j = float(probs @ j)
    mean_j2 = float(probs @ j**2)
    var_j = float(probs @ (j - mean_j) ** 2)
    if var_j < 0.0:
        if var_j < -VARIANCE_CLAMP:
            logger.warning("Negative variance %.3e beyond clamp tolerance", var_j)
        var_j = 0.0

    with np.errstate(divide="ignore"):
        log_probs = np.log(probs)
    exp_plus = float(np.sum(np.exp(log_probs + 2.0 * j)))
    exp_minus = float(np.sum(np.exp(log_probs - 2.0 * j)))

    return MomentSet(
        mean_J=mean_j,
        mean_J2=mean_j2,
        var_J=var_j,
        exp_U=expect_U_power(state, 1),
        exp_U2=expect_U_power(state, 2),
        exp_expJ_plus=exp_plus,
        exp_expJ_minus=exp_minus,
    )
