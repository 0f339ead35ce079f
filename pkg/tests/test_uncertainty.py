import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from errors import ArgumentError
from fock import FockState
from logger import get_logger, setup_logging
from states import CSParams, SCSpec, StateKind, build_cs, build_scs
from uncertainty import (
    Convention,
    delta2_J,
    delta2_phi,
    engine_measures,
    expect_expJ_closed,
    expect_expJ_printed,
    expect_U2_closed,
    expect_U_closed,
    heisenberg_check,
    minimum_bound_closed,
    small_angle_report,
    sum_rule,
    uncertainty_report,
)

setup_logging()
logger = get_logger(__name__)

LEVEL_GRID = [round(-2.0 + 0.1 * k, 10) for k in range(101)]


def brute_weights(l_prime: float, phi: float = 0.0, width: int = 40) -> tuple[np.ndarray, ...]:
    j = np.arange(-width, width + 1, dtype=np.float64)
    c = np.exp((l_prime - 1j * phi) * j - j**2 / 2)
    return j, c, np.abs(c) ** 2


def test_expect_u_matches_brute_force() -> None:
    _, c, w = brute_weights(0.0)
    expected = complex(np.vdot(c[1:], c[:-1])) / w.sum()
    value = expect_U_closed(0.0, 0.0, Convention.NORMALIZED)
    assert abs(value - expected) <= 1e-12
    assert value.real == pytest.approx(0.778640, abs=1e-6)


@pytest.mark.parametrize("l_prime", [-0.5, 0.0, 0.69, 1.0, 2.5])
@pytest.mark.parametrize("phi", [0.0, 1.0, math.pi])
def test_normalized_closed_forms_match_brute_force(l_prime: float, phi: float) -> None:
    j, c, w = brute_weights(l_prime, phi)
    total = w.sum()
    exp_u = complex(np.vdot(c[1:], c[:-1])) / total
    exp_u2 = complex(np.vdot(c[2:], c[:-2])) / total

    assert abs(expect_U_closed(l_prime, phi, Convention.NORMALIZED) - exp_u) <= 1e-11 * abs(exp_u)
    assert abs(expect_U2_closed(l_prime, phi, Convention.NORMALIZED) - exp_u2) <= 1e-11 * abs(
        exp_u2
    )
    for lam in (1, -1):
        expected = float(w @ np.exp(-2 * lam * j)) / total
        assert expect_expJ_closed(l_prime, lam, Convention.NORMALIZED) == pytest.approx(
            expected, rel=1e-11
        )


def test_phase_moment_of_order_two_is_exact() -> None:
    for l_prime in (-1.3, 0.0, 4.0, 9.5):
        value = expect_U2_closed(l_prime, 0.4, Convention.NORMALIZED)
        assert abs(value - math.exp(-1) * complex(math.cos(0.8), math.sin(0.8))) <= 1e-14


def test_normalized_measures_are_flat() -> None:
    for l_prime in LEVEL_GRID:
        assert delta2_J(l_prime, Convention.NORMALIZED) == pytest.approx(0.5, abs=1e-9)
        assert delta2_phi(l_prime, Convention.NORMALIZED) == pytest.approx(0.5, abs=1e-9)


def test_literal_convention_sum_rule() -> None:
    for l_prime in LEVEL_GRID:
        rule = sum_rule(l_prime, Convention.PAPER_LITERAL)
        assert rule.sum == pytest.approx(abs(l_prime - 1.0) + 0.5, abs=1e-9)
        assert rule.paper_target == l_prime
    assert sum_rule(1.0, Convention.PAPER_LITERAL).sum == pytest.approx(0.5, abs=1e-9)
    assert sum_rule(4.0, Convention.PAPER_LITERAL).sum == pytest.approx(3.5, abs=1e-9)
    # offset from the target l' shrinks like 1/2 l'
    for l_prime, share in ((4.0, 0.15), (10.0, 0.05)):
        deviation = sum_rule(l_prime, Convention.PAPER_LITERAL).deviation
        assert abs(deviation) / l_prime <= share + 1e-9


def test_only_literal_convention_breaks_unitarity() -> None:
    for l_prime in LEVEL_GRID:
        assert abs(expect_U_closed(l_prime, 0.0, Convention.NORMALIZED)) <= 1.0
        assert abs(expect_U2_closed(l_prime, 0.0, Convention.NORMALIZED)) <= 1.0
    assert abs(expect_U2_closed(4.0, 0.0, Convention.PAPER_LITERAL)) > 1.0
    assert abs(expect_U_closed(4.0, 0.0, Convention.PAPER_LITERAL)) > 1.0


def test_exp_j_conventions_agree() -> None:
    for l_prime in (-0.5, 0.3, 2.5):
        for lam in (1, -1):
            normalized = expect_expJ_closed(l_prime, lam, Convention.NORMALIZED)
            paper = expect_expJ_closed(l_prime, lam, Convention.PAPER_LITERAL)
            assert paper == pytest.approx(normalized, rel=1e-12)
    with pytest.raises(ArgumentError):
        expect_expJ_closed(0.0, 2, Convention.NORMALIZED)


def test_printed_geometric_form() -> None:
    phi, r, l = 1.0, 0.3, 0.2  # noqa: E741
    l_prime = l + r * math.sin(phi / 2) - math.log(1 + r * math.cos(phi / 2))
    for lam in (1, -1):
        assert expect_expJ_printed(phi, r, l, lam) == pytest.approx(
            expect_expJ_closed(l_prime, lam, Convention.PAPER_LITERAL), rel=1e-12
        )


def test_heisenberg_holds_for_coherent_and_cat_states() -> None:
    for l_prime in LEVEL_GRID:
        check = heisenberg_check(build_cs(CSParams(l_prime=l_prime, phi=0.3), scaled=True))
        assert check.lhs - check.rhs >= -1e-12
        assert check.satisfied

    for kind in (StateKind.OPPOSITE_ANGLE, StateKind.OPPOSITE_XI, StateKind.OPPOSITE_XI_MINUS):
        for l_prime in (-1.0, 0.0, 0.4, 2.0):
            spec = SCSpec(kind=kind, base=CSParams(l_prime=l_prime, phi=1.1), chi=0.4)
            check = heisenberg_check(build_scs(spec, scaled=True))
            assert check.lhs - check.rhs >= -1e-12


def test_heisenberg_degenerate_on_basis_state() -> None:
    check = heisenberg_check(FockState.basis(0))
    assert (check.lhs, check.rhs) == (0.0, 0.0)
    assert check.satisfied


def test_minimum_bound_matches_engine() -> None:
    for l_prime in (-0.5, 0.0, 1.3):
        engine = heisenberg_check(build_cs(CSParams(l_prime=l_prime, phi=0.5)))
        closed = minimum_bound_closed(l_prime, 0.5, Convention.NORMALIZED)
        assert closed == pytest.approx(engine.rhs, rel=1e-10)


def test_engine_measures_on_coherent_state() -> None:
    d2_j, d2_phi = engine_measures(build_cs(CSParams(l_prime=0.3, phi=0.2)))
    assert d2_j == pytest.approx(0.5, abs=1e-9)
    assert d2_phi == pytest.approx(0.5, abs=1e-9)


def test_small_angle_reading() -> None:
    report = small_angle_report(0.0, Convention.NORMALIZED)
    assert report.product == pytest.approx(0.25, abs=1e-9)
    assert report.target == 0.25
    # |<U>|^2 = e^{-1/2} (...) stays far from 1
    assert not report.valid


def test_uncertainty_report() -> None:
    report = uncertainty_report(1.0, 0.5, Convention.PAPER_LITERAL)
    logger.info("Report at l'=1: %s", report)
    assert report.sum == pytest.approx(0.5, abs=1e-9)
    assert report.heis_satisfied
    assert report.d2_J == pytest.approx(0.5, abs=1e-9)
