import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from errors import ArgumentError, DomainError, UndefinedMomentsError
from fock import (
    FockState,
    apply_J,
    distance,
    expect_U_power,
    inner_product,
    ladder_X,
    moments,
    norm2,
    phase_shift,
    scale,
    scale_exp_J,
    superpose,
)
from logger import get_logger, setup_logging

setup_logging()
logger = get_logger(__name__)


def random_state(rng: np.random.Generator, lo: int = -6, size: int = 13) -> FockState:
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return FockState(lo, amps / np.linalg.norm(amps))


def coherent_amplitudes(l_prime: float, phi: float, lo: int, hi: int) -> np.ndarray:
    j = np.arange(lo, hi + 1, dtype=np.float64)
    return np.exp((l_prime - 1j * phi) * j - j**2 / 2)


def test_basis_is_orthonormal() -> None:
    a, b = FockState.basis(3), FockState.basis(4)
    assert norm2(a) == 1.0
    assert inner_product(a, a) == 1.0
    assert inner_product(a, b) == 0.0
    assert distance(a, b) == pytest.approx(math.sqrt(2.0))


def test_state_is_frozen_copy() -> None:
    amps = np.array([1.0, 2.0])
    state = FockState(0, amps)
    amps[0] = 5.0
    assert state.amplitude(0) == 1.0
    assert state.amplitude(7) == 0.0
    with pytest.raises(ValueError, match="read-only"):
        state.amps[0] = 3.0


def test_invalid_states() -> None:
    with pytest.raises(ArgumentError):
        FockState(0, np.array([]))
    with pytest.raises(DomainError):
        FockState(0, np.array([1.0, np.nan]))


def test_shift_and_number_operator() -> None:
    state = FockState(-1, np.array([1.0, 2.0, 3.0]))
    raised = phase_shift(state, 2)
    assert (raised.j_lo, raised.j_hi) == (1, 3)
    assert raised.amplitude(3) == 3.0

    counted = apply_J(state)
    assert counted.amplitude(-1) == -1.0
    assert counted.amplitude(0) == 0.0
    assert counted.amplitude(1) == 3.0


def test_ladder_matrix_elements() -> None:
    for j in (-3, 0, 2):
        image = ladder_X(FockState.basis(j))
        assert (image.j_lo, image.j_hi) == (j + 1, j + 1)
        assert image.amplitude(j + 1) == pytest.approx(math.exp(-(j + 0.5)), rel=1e-15)


def test_exp_j_scaling_in_log_domain() -> None:
    state = FockState(700, np.array([1e-300, 1.0]))
    scaled = scale_exp_J(state, -1.0)
    assert scaled.amplitude(701) == pytest.approx(math.exp(-701.0), rel=1e-12)
    assert np.all(np.isfinite(scaled.amps))


def test_superposition_cancels_to_zero_state() -> None:
    state = FockState(0, coherent_amplitudes(0.2, 1.0, -10, 10))
    difference = superpose(state, state, -1.0)
    assert difference.is_zero
    with pytest.raises(UndefinedMomentsError):
        moments(difference)

    doubled = superpose(state, scale(state, 1j), -1j)
    assert norm2(doubled) == pytest.approx(4 * norm2(state), rel=1e-14)


def test_moments_match_brute_force() -> None:
    l_prime, phi = 0.69, 1.0
    lo, hi = -30, 30
    c = coherent_amplitudes(l_prime, phi, lo, hi)
    j = np.arange(lo, hi + 1, dtype=np.float64)
    w = np.abs(c) ** 2
    total = w.sum()
    mean = (w @ j) / total
    var = (w @ (j - mean) ** 2) / total
    exp_u = sum(np.conj(c[k]) * c[k - 1] for k in range(1, c.size)) / total
    exp_u2 = sum(np.conj(c[k]) * c[k - 2] for k in range(2, c.size)) / total
    exp_plus = (w @ np.exp(2 * j)) / total

    m = moments(FockState(lo, c))
    assert m.mean_J == pytest.approx(mean, rel=1e-12)
    assert m.var_J == pytest.approx(var, rel=1e-12)
    assert abs(m.exp_U - exp_u) <= 1e-12 * abs(exp_u)
    assert abs(m.exp_U2 - exp_u2) <= 1e-12 * abs(exp_u2)
    assert m.exp_expJ_plus == pytest.approx(exp_plus, rel=1e-12)
    assert m.mean_J2 == pytest.approx(var + mean**2, rel=1e-12)


def test_discrete_gaussian_variance() -> None:
    m = moments(FockState(-20, coherent_amplitudes(0.0, 0.0, -20, 20)))
    logger.info("Var(J) at l'=0: %.6f", m.var_J)
    assert m.var_J == pytest.approx(0.49898, abs=1e-5)
    # comb ripple around 1/2 is 2 pi^2 e^{-pi^2}
    assert abs(m.var_J - 0.5) <= 2 * math.pi**2 * math.exp(-math.pi**2) * 1.01


def test_number_and_phase_commutator() -> None:
    rng = np.random.default_rng(7)
    for _ in range(5):
        state = random_state(rng)
        raised = phase_shift(state, 1)
        commutator = superpose(apply_J(raised), phase_shift(apply_J(state), 1), -1.0)
        assert distance(commutator, raised) <= 1e-12


def test_phase_moments_are_bounded_on_normalized_states() -> None:
    rng = np.random.default_rng(11)
    for size in (1, 2, 5, 13):
        state = random_state(rng, size=size)
        assert expect_U_power(state, 0) == pytest.approx(1.0, rel=1e-14)
        for k in (1, 2, 3):
            assert abs(expect_U_power(state, k)) <= 1.0 + 1e-12
            assert expect_U_power(state, -k) == expect_U_power(state, k).conjugate()


def test_phase_moment_of_basis_state() -> None:
    m = moments(FockState.basis(0))
    assert (m.mean_J, m.var_J) == (0.0, 0.0)
    assert m.exp_U == 0j
    assert m.exp_U2 == 0j
    assert expect_U_power(FockState.basis(0), 3) == 0j
