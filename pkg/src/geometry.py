"""
Strip geometry: embedding of points on the Möbius strip, radial profiles and the
effective level l' that labels a coherent state at a given strip angle.

Angles are plain radians and are never reduced modulo 2*pi; the strip only closes
after a 4*pi turn.
"""

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.optimize import brentq

from errors import ArgumentError, DomainError
from logger import get_logger

logger = get_logger(__name__)

MAJOR_RADIUS = 1.0


class ProfileKind(StrEnum):
    CONSTANT = "const"
    SIN_SQUARED = "sin2"
    COS_SQUARED = "cos2"


class RadialProfile(BaseModel):
    """
    Radial coordinate r(phi) of the particle across the strip width.

    The constant profile must satisfy 0 <= r0 < 1; the sin2/cos2 profiles are
    sin(phi)**2 / 2 and cos(phi)**2 / 2, which stay inside [0, 1/2].
    """

    model_config = ConfigDict(frozen=True)

    kind: ProfileKind = ProfileKind.CONSTANT
    r0: float = 0.0

    @model_validator(mode="after")
    def _check_radius(self) -> Self:
        if self.kind is ProfileKind.CONSTANT and not 0.0 <= self.r0 < MAJOR_RADIUS:
            raise ValueError(f"constant radius must satisfy 0 <= r < 1, got {self.r0}")
        return self

    @classmethod
    def constant(cls, r0: float) -> "RadialProfile":
        return cls(kind=ProfileKind.CONSTANT, r0=r0)

    @classmethod
    def parse(cls, text: str) -> "RadialProfile":
        """
        Parses the CLI notation: ``const:<value>``, ``sin2`` or ``cos2``.
        """
        token = text.strip().lower()
        if token.startswith("const:"):
            try:
                r0 = float(token.split(":", 1)[1])
            except ValueError as e:
                raise ArgumentError(f"invalid constant profile '{text}'") from e
            return cls.constant(r0)
        try:
            kind = ProfileKind(token)
        except ValueError as e:
            raise ArgumentError(f"unknown radial profile '{text}'") from e
        if kind is ProfileKind.CONSTANT:
            raise ArgumentError("constant profile needs a value, e.g. 'const:0.5'")
        return cls(kind=kind)

    @property
    def label(self) -> str:
        if self.kind is ProfileKind.CONSTANT:
            return f"const:{self.r0:g}"
        return self.kind.value


class StripConfig(BaseModel):
    """
    Strip geometry: axial offset l, radial profile, and the major radius fixed at 1.
    """

    model_config = ConfigDict(frozen=True)

    l: float = 0.0  # noqa: E741
    profile: RadialProfile = RadialProfile()
    major_radius: float = MAJOR_RADIUS

    @field_validator("l")
    @classmethod
    def _finite_offset(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("axial offset l must be finite")
        return value

    @field_validator("major_radius")
    @classmethod
    def _fixed_radius(cls, value: float) -> float:
        if value != MAJOR_RADIUS:
            raise ValueError("the major radius R is fixed at 1")
        return value


@dataclass(frozen=True, slots=True)
class StripPoint:
    x: float
    y: float
    z: float
    phi: float
    r: float
    l_prime: float


def _check_radius(r: float) -> None:
    if not 0.0 <= r < MAJOR_RADIUS:
        raise DomainError(f"radial value must satisfy 0 <= r < 1, got {r}")


def radial_profile_eval(profile: RadialProfile, phi: float) -> float:
    if profile.kind is ProfileKind.CONSTANT:
        return profile.r0
    if profile.kind is ProfileKind.SIN_SQUARED:
        return math.sin(phi) ** 2 / 2.0
    return math.cos(phi) ** 2 / 2.0


def torus_constraint(phi: float) -> float:
    """
    Polar torus angle theta = (phi + pi) / 2 that reduces the torus to the strip.
    """
    return (phi + math.pi) / 2.0


def torus_point(
    phi: float, theta: float, r: float, l: float  # noqa: E741
) -> tuple[float, float, float]:
    """
    Point on the unit torus with independent polar angle theta.

    With theta = torus_constraint(phi) this is the strip embedding, since
    sin(theta) = cos(phi/2) and -cos(theta) = sin(phi/2).
    """
    _check_radius(r)
    ring = MAJOR_RADIUS + r * math.sin(theta)
    return ring * math.cos(phi), ring * math.sin(phi), l - r * math.cos(theta)


def effective_level(phi: float, r: float, l: float) -> float:  # noqa: E741
    """
    l' = l + r sin(phi/2) - ln(1 + r cos(phi/2)).

    r < 1 keeps the logarithm argument above 1 - r > 0.
    """
    _check_radius(r)
    return l + r * math.sin(phi / 2.0) - math.log1p(r * math.cos(phi / 2.0))


def xi_value(phi: float, r: float, l: float) -> complex:  # noqa: E741
    """
    Ladder eigenvalue in its geometric form e^{-(l + r sin(phi/2)) + i phi} (1 + r cos(phi/2)).

    Equal to e^{-l' + i phi}.
    """
    _check_radius(r)
    modulus = math.exp(-(l + r * math.sin(phi / 2.0))) * (1.0 + r * math.cos(phi / 2.0))
    return complex(modulus * math.cos(phi), modulus * math.sin(phi))


def embed_point(phi: float, r: float, l: float) -> StripPoint:  # noqa: E741
    _check_radius(r)
    half_cos = math.cos(phi / 2.0)
    ring = MAJOR_RADIUS + r * half_cos
    return StripPoint(
        x=ring * math.cos(phi),
        y=ring * math.sin(phi),
        z=l + r * math.sin(phi / 2.0),
        phi=phi,
        r=r,
        l_prime=effective_level(phi, r, l),
    )


def level_at(config: StripConfig, phi: float) -> float:
    return effective_level(phi, radial_profile_eval(config.profile, phi), config.l)


def sample_trajectory(
    config: StripConfig, phi_min: float, phi_max: float, n: int
) -> list[StripPoint]:
    """
    Samples n points at uniform phi spacing, endpoints included.

    Args:
        config: Strip geometry.
        phi_min: First angle (radians).
        phi_max: Last angle (radians), strictly greater than phi_min.
        n: Number of samples, at least 2.

    Returns:
        Ordered list of embedded points.
    """
    if n < 2:
        raise ArgumentError(f"a trajectory needs at least 2 samples, got {n}")
    if not phi_min < phi_max:
        raise ArgumentError(f"empty angle range [{phi_min}, {phi_max}]")

    angles = np.linspace(phi_min, phi_max, n)
    points = [
        embed_point(float(phi), radial_profile_eval(config.profile, float(phi)), config.l)
        for phi in angles
    ]
    logger.debug("Sampled %d trajectory points on [%g, %g]", n, phi_min, phi_max)
    return points


def level_crossings(
    config: StripConfig,
    target: float,
    phi_min: float,
    phi_max: float,
    samples: int = 2048,
) -> list[float]:
    """
    Angles in [phi_min, phi_max] where l'(phi) equals target.

    Sign changes are bracketed on a uniform scan and refined with Brent's method.
    Tangential touches without a sign change are not reported.
    """
    if samples < 2 or not phi_min < phi_max:
        raise ArgumentError("level crossings need a nonempty range and at least 2 samples")

    def shifted(phi: float) -> float:
        return level_at(config, phi) - target

    grid = np.linspace(phi_min, phi_max, samples)
    values = [shifted(float(phi)) for phi in grid]
    roots: list[float] = []
    brackets = zip(grid[:-1], grid[1:], values[:-1], values[1:], strict=True)
    for left, right, f_left, f_right in brackets:
        if f_left == 0.0:
            roots.append(float(left))
        elif f_left * f_right < 0.0:
            roots.append(float(brentq(shifted, float(left), float(right), xtol=1e-12)))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    logger.debug("Found %d crossings of l'=%g", len(roots), target)
    return roots
