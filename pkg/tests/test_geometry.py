import math
import sys
from collections.abc import Callable
from pathlib import Path

import pytest
from pydantic import ValidationError

# Add src to path
sys.path.append(str(Path(__file__).parent.parent / "src"))

from errors import ArgumentError, DomainError
from geometry import (
    ProfileKind,
    RadialProfile,
    StripConfig,
    embed_point,
    effective_level,
    level_at,
    level_crossings,
    radial_profile_eval,
    sample_trajectory,
    torus_constraint,
    torus_point,
    xi_value,
)
from logger import get_logger, setup_logging
from uncertainty import Convention, sum_rule

setup_logging()
logger = get_logger(__name__)


def _level(phi: float, r: float, l: float) -> float:  # noqa: E741
    return l + r * math.sin(phi / 2) - math.log(1 + r * math.cos(phi / 2))


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    f_lo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def test_embedding_closes_after_four_pi() -> None:
    start = embed_point(0.0, 0.5, 0.0)
    half = embed_point(2 * math.pi, 0.5, 0.0)
    full = embed_point(4 * math.pi, 0.5, 0.0)

    assert start.x == pytest.approx(1.5)
    assert half.x == pytest.approx(0.5)
    assert full.x == pytest.approx(1.5)
    assert start.l_prime == pytest.approx(-math.log(1.5), abs=1e-12)
    assert half.l_prime == pytest.approx(math.log(2.0), abs=1e-12)
    assert full.l_prime == pytest.approx(start.l_prime, abs=1e-12)


def test_cylinder_has_circle_period() -> None:
    a = embed_point(0.0, 0.0, 1.0)
    b = embed_point(2 * math.pi, 0.0, 1.0)
    assert (a.x, a.z, a.l_prime) == pytest.approx((b.x, b.z, b.l_prime), abs=1e-12)
    assert a.l_prime == 1.0


def test_strip_is_constrained_torus() -> None:
    for phi in (0.0, 0.7, math.pi, 5.0):
        point = embed_point(phi, 0.4, 0.3)
        torus = torus_point(phi, torus_constraint(phi), 0.4, 0.3)
        assert torus == pytest.approx((point.x, point.y, point.z), abs=1e-12)


def test_xi_geometric_form_matches_level() -> None:
    for phi, r, l in [(0.0, 0.5, 0.0), (1.0, 0.3, 0.2), (7.0, 0.9, -1.0)]:  # noqa: E741
        expected = complex(math.cos(phi), math.sin(phi)) * math.exp(-_level(phi, r, l))
        assert abs(xi_value(phi, r, l) - expected) <= 1e-12 * abs(expected)
        assert effective_level(phi, r, l) == pytest.approx(_level(phi, r, l), abs=1e-14)


def test_radius_domain() -> None:
    with pytest.raises(DomainError):
        embed_point(0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        effective_level(0.0, -0.1, 0.0)
    with pytest.raises(ValidationError):
        RadialProfile.constant(1.0)


def test_profile_parsing() -> None:
    assert RadialProfile.parse("const:0.5").label == "const:0.5"
    assert RadialProfile.parse("COS2").kind is ProfileKind.COS_SQUARED
    for bad in ("bogus", "const", "const:x"):
        with pytest.raises(ArgumentError):
            RadialProfile.parse(bad)


def test_profile_values() -> None:
    sin2 = RadialProfile.parse("sin2")
    cos2 = RadialProfile.parse("cos2")
    assert radial_profile_eval(sin2, 0.0) == 0.0
    assert radial_profile_eval(sin2, math.pi / 2) == pytest.approx(0.5)
    assert radial_profile_eval(cos2, 0.0) == pytest.approx(0.5)
    assert radial_profile_eval(RadialProfile.constant(0.3), 12.0) == 0.3


def test_sample_trajectory() -> None:
    config = StripConfig(l=0.0, profile=RadialProfile.parse("sin2"))
    points = sample_trajectory(config, 0.0, 2 * math.pi, 2)
    assert len(points) == 2
    first, last = points
    assert (first.x, first.y, first.z, first.l_prime) == pytest.approx(
        (last.x, last.y, last.z, last.l_prime), abs=1e-12
    )

    with pytest.raises(ArgumentError):
        sample_trajectory(config, 0.0, 1.0, 1)
    with pytest.raises(ArgumentError):
        sample_trajectory(config, 1.0, 1.0, 5)


def test_level_crossings_match_bisection() -> None:
    config = StripConfig(l=0.9, profile=RadialProfile.parse("cos2"))

    def shifted(phi: float) -> float:
        return _level(phi, math.cos(phi) ** 2 / 2, 0.9) - 1.0

    grid = [4 * math.pi * k / 4000 for k in range(4001)]
    oracle = [
        _bisect(shifted, a, b)
        for a, b in zip(grid[:-1], grid[1:], strict=True)
        if shifted(a) * shifted(b) < 0
    ]
    roots = level_crossings(config, 1.0, 0.0, 4 * math.pi)
    logger.info("Crossings of l'=1: %s", roots)

    assert oracle
    assert len(roots) == len(oracle)
    for root, expected in zip(roots, oracle, strict=True):
        assert root == pytest.approx(expected, abs=1e-6)
        assert level_at(config, root) == pytest.approx(1.0, abs=1e-10)
        # the literal-convention sum curve bottoms out at 1/2 on every crossing
        assert sum_rule(level_at(config, root), Convention.PAPER_LITERAL).sum == pytest.approx(
            0.5, abs=1e-9
        )
