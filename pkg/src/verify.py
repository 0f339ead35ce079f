"""
Cross-checks of every closed form against the Fock engine and the lattice-sum duals,
plus periodicity reports along the strip.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, ConfigDict

from errors import ArgumentError, UndefinedMomentsError
from fock import DEFAULT_EPSILON_TAIL, distance, inner_product, ladder_X, moments, norm2, scale
from geometry import RadialProfile, StripConfig
from latticesum import (
    CANCELLATION_RTOL,
    GaussSumSpec,
    gauss_sum_direct,
    gauss_sum_poisson,
    relative_deviation,
    unit_sum,
)
from logger import get_logger
from runner import run_ordered
from states import (
    CSParams,
    ChiRule,
    StateKind,
    build_cs,
    fidelity,
    norm_closed,
    overlap_closed,
    strip_state,
)
from uncertainty import Convention, expect_expJ_closed, expect_U2_closed, expect_U_closed

logger = get_logger(__name__)

FIDELITY_TOL = 1e-12
RESIDUAL_TOL = 1e-10
POISSON_TOL = 1e-10
DISCREPANCY_TOL = 1e-10
PAPER_MATCH_TOL = 1e-9
UNITARITY_SLACK = 1e-9

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class Quantity(StrEnum):
    NORM = "norm"
    OVERLAP = "overlap"
    EXPECT_U = "expect_U"
    EXPECT_U2 = "expect_U2"
    EXPECT_EXPJ = "expect_expJ"


class Flag(StrEnum):
    UNITARITY_VIOLATION = "unitarity-violation"
    PAPER_UNREPRODUCED = "paper-unreproduced"


class QuantityParams(BaseModel):
    """
    Parameters of a closed-vs-direct comparison. The second label pair is only
    read for overlaps, lam only for expect_expJ.
    """

    model_config = ConfigDict(frozen=True)

    l_prime: float
    phi: float = 0.0
    l_prime2: float | None = None
    phi2: float = 0.0
    lam: int = 1


def _complex_dict(value: complex) -> dict[str, float]:
    return {"re": value.real, "im": value.imag}


@dataclass(frozen=True, slots=True)
class EigenvalueResidual:
    l_prime: float
    phi: float
    residual: float
    tail_bound: float
    passed: bool
    warning: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "l_prime": self.l_prime,
            "phi": self.phi,
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "pass": self.passed,
            "warning": self.warning,
        }


@dataclass(frozen=True, slots=True)
class PeriodicityEntry:
    profile: str
    l: float  # noqa: E741
    phi0: float
    period: float
    fidelity: float
    passed: bool
    kind: StateKind = StateKind.CS

    def to_dict(self) -> dict[str, Any]:
        return {
            "profile": self.profile,
            "l": self.l,
            "phi0": self.phi0,
            "period": self.period,
            "state": self.kind.value,
            "fidelity": self.fidelity,
            "pass": self.passed,
        }


@dataclass(frozen=True, slots=True)
class PoissonCheck:
    a: float
    beta: complex
    deviation: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "a": self.a,
            "beta": _complex_dict(self.beta),
            "deviation": self.deviation,
            "pass": self.passed,
        }


@dataclass(frozen=True, slots=True)
class DiscrepancyEntry:
    quantity: Quantity
    params: QuantityParams
    engine_value: complex
    closed_normalized: complex
    closed_paper_literal: complex
    rel_dev_normalized: float
    flags: frozenset[Flag]
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "quantity": self.quantity.value,
            "params": self.params.model_dump(),
            "engine_value": _complex_dict(self.engine_value),
            "closed_normalized": _complex_dict(self.closed_normalized),
            "closed_paper_literal": _complex_dict(self.closed_paper_literal),
            "rel_dev_normalized": self.rel_dev_normalized,
            "flags": sorted(flag.value for flag in self.flags),
            "pass": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    eigenvalue_residuals: list[EigenvalueResidual] = field(default_factory=list)
    poisson_checks: list[PoissonCheck] = field(default_factory=list)
    discrepancies: list[DiscrepancyEntry] = field(default_factory=list)
    periodicity: list[PeriodicityEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        sections: list[Sequence[Any]] = [
            self.eigenvalue_residuals,
            self.poisson_checks,
            self.discrepancies,
            self.periodicity,
        ]
        return all(entry.passed for section in sections for entry in section)

    def to_dict(self) -> dict[str, Any]:
        return {
            "eigenvalue_residuals": [e.to_dict() for e in self.eigenvalue_residuals],
            "poisson_checks": [e.to_dict() for e in self.poisson_checks],
            "discrepancies": [e.to_dict() for e in self.discrepancies],
            "periodicity": [e.to_dict() for e in self.periodicity],
        }


def eigenvalue_residual(
    l_prime: float,
    phi: float,
    padding: int | None = None,
    epsilon_tail: float = DEFAULT_EPSILON_TAIL,
) -> EigenvalueResidual:
    """
    ||X|xi> - xi |xi>|| / |||xi>|| for the truncated CS.

    A window too narrow for epsilon_tail is reported with a truncation warning.
    """
    p = CSParams(l_prime=l_prime, phi=phi, epsilon_tail=epsilon_tail)
    state = build_cs(p, padding)
    residual = distance(ladder_X(state), scale(state, p.xi)) / math.sqrt(norm2(state))

    warning = None
    if state.tail_bound > epsilon_tail:
        warning = (
            f"truncation: window [{state.j_lo}, {state.j_hi}] leaves tail "
            f"{state.tail_bound:.3e} above epsilon_tail {epsilon_tail:.1e}"
        )
    return EigenvalueResidual(
        l_prime=l_prime,
        phi=phi,
        residual=residual,
        tail_bound=state.tail_bound,
        passed=residual <= RESIDUAL_TOL,
        warning=warning,
    )


def periodicity_report(
    config: StripConfig,
    phi0s: Sequence[float],
    periods: Sequence[float],
    kind: StateKind = StateKind.CS,
    chi: ChiRule = 0.0,
    padding: int | None = None,
    workers: int = 1,
) -> list[PeriodicityEntry]:
    """
    Fidelity between the state at phi0 and at phi0 + period, one entry per pair.

    Both states take l'(phi) from the geometry and phi itself in the coefficients.
    """
    if not phi0s or not periods:
        raise ArgumentError("periodicity needs at least one phi0 and one period")

    pairs = [(phi0, period) for phi0 in phi0s for period in periods]

    def evaluate(pair: tuple[float, float]) -> PeriodicityEntry:
        phi0, period = pair
        start = strip_state(config, phi0, kind, chi, padding=padding, scaled=True)
        shifted = strip_state(config, phi0 + period, kind, chi, padding=padding, scaled=True)
        try:
            value = fidelity(start, shifted)
        except UndefinedMomentsError:
            logger.warning("Zero state at phi0=%g for %s; fidelity undefined", phi0, kind)
            value = math.nan
        return PeriodicityEntry(
            profile=config.profile.label,
            l=config.l,
            phi0=phi0,
            period=period,
            fidelity=value,
            passed=abs(value - 1.0) <= FIDELITY_TOL,
            kind=kind,
        )

    return run_ordered(evaluate, pairs, workers)


def _rel(reference: complex, value: complex, modulus: float = 0.0) -> float:
    """
    |reference - value| / |reference|. A reference that cancels against modulus, the
    size of the summed terms, is measured against modulus instead.
    """
    denominator = abs(reference)
    if denominator <= CANCELLATION_RTOL * modulus:
        denominator = modulus
    if denominator == 0.0:
        return 0.0 if value == reference else math.inf
    return abs(reference - value) / denominator


def closed_vs_direct(
    quantity: Quantity | str,
    params: QuantityParams,
    padding: int | None = None,
    tol: float = DISCREPANCY_TOL,
) -> DiscrepancyEntry:
    """
    Engine value from Fock sums on built states against both closed-form conventions.
    """
    try:
        quantity = Quantity(quantity)
    except ValueError as e:
        raise ArgumentError(f"unknown quantity id '{quantity}'") from e

    p = CSParams(l_prime=params.l_prime, phi=params.phi)
    unitary_bound: float | None = None
    modulus = 0.0

    if quantity is Quantity.NORM:
        engine = complex(norm2(build_cs(p, padding)))
        normalized = complex(norm_closed(p.l_prime))
        # theta_3(l' | i pi) reads as the same sum
        paper = normalized
    elif quantity is Quantity.OVERLAP:
        l_prime2 = params.l_prime if params.l_prime2 is None else params.l_prime2
        p2 = CSParams(l_prime=l_prime2, phi=params.phi2)
        engine = inner_product(build_cs(p, padding), build_cs(p2, padding))
        normalized = overlap_closed(p, p2)
        # literal form keeps a single phase outside the sum
        angle = -(p.phi - p2.phi)
        # sum_j |conj(a_j) b_j| = S(1, l'_1 + l'_2)
        modulus = unit_sum(p.l_prime + l_prime2).value.real
        paper = complex(math.cos(angle), math.sin(angle)) * modulus
    elif quantity is Quantity.EXPECT_EXPJ:
        m = moments(build_cs(p, padding, scaled=True))
        engine = complex(m.exp_expJ_minus if params.lam == 1 else m.exp_expJ_plus)
        normalized = complex(expect_expJ_closed(p.l_prime, params.lam, Convention.NORMALIZED))
        paper = complex(expect_expJ_closed(p.l_prime, params.lam, Convention.PAPER_LITERAL))
    else:
        m = moments(build_cs(p, padding, scaled=True))
        closed = expect_U_closed if quantity is Quantity.EXPECT_U else expect_U2_closed
        engine = m.exp_U if quantity is Quantity.EXPECT_U else m.exp_U2
        normalized = closed(p.l_prime, p.phi, Convention.NORMALIZED)
        paper = closed(p.l_prime, p.phi, Convention.PAPER_LITERAL)
        unitary_bound = 1.0 + UNITARITY_SLACK
        modulus = 1.0

    flags: set[Flag] = set()
    if unitary_bound is not None and max(abs(normalized), abs(paper)) > unitary_bound:
        flags.add(Flag.UNITARITY_VIOLATION)
    if not _rel(engine, paper, modulus) <= PAPER_MATCH_TOL:
        flags.add(Flag.PAPER_UNREPRODUCED)

    rel_dev = _rel(engine, normalized, modulus)
    return DiscrepancyEntry(
        quantity=quantity,
        params=params,
        engine_value=engine,
        closed_normalized=normalized,
        closed_paper_literal=paper,
        rel_dev_normalized=rel_dev,
        flags=frozenset(flags),
        passed=rel_dev <= tol,
    )


def poisson_check(a: float, beta: complex) -> float:
    """|direct - dual| / |direct|; a cancelled direct sum is measured against its term scale."""
    spec = GaussSumSpec(a, beta)
    return relative_deviation(gauss_sum_direct(spec), gauss_sum_poisson(spec))


class VerificationGrid(BaseModel):
    """
    Parameter grids of the full verification run.
    """

    model_config = ConfigDict(frozen=True)

    residual_levels: tuple[float, ...] = (-1.0, 0.0, 1.0, 2.0)
    residual_angles: tuple[float, ...] = (0.0, 1.0, math.pi, TWO_PI)
    poisson_real: tuple[float, ...] = tuple(float(x) for x in range(-10, 11, 2))
    poisson_imag: tuple[float, ...] = (-math.pi, -math.pi / 2, 0.0, math.pi / 2, math.pi)
    discrepancy_levels: tuple[float, ...] = (-0.5, 0.0, 0.69, 1.0, 2.5)
    discrepancy_angles: tuple[float, ...] = (0.0, 1.0, math.pi)
    overlap_partner: tuple[float, float] = (-0.405465, 0.0)
    informational_levels: tuple[float, ...] = (4.0,)
    radial_values: tuple[float, ...] = (0.0, 0.3, 0.5, 0.7)
    strip_offset: float = 0.0
    periodicity_angles: tuple[float, ...] = (0.0, 1.0, math.pi)
    chi_follow_angles: tuple[float, ...] = (0.0, 1.0)
    padding: int | None = None
    tol: float = DISCREPANCY_TOL


def _discrepancy_jobs(grid: VerificationGrid) -> list[tuple[Quantity, QuantityParams]]:
    jobs: list[tuple[Quantity, QuantityParams]] = []
    partner_level, partner_angle = grid.overlap_partner
    for l_prime in grid.discrepancy_levels:
        for phi in grid.discrepancy_angles:
            jobs.append((Quantity.NORM, QuantityParams(l_prime=l_prime, phi=phi)))
            jobs.append(
                (
                    Quantity.OVERLAP,
                    QuantityParams(
                        l_prime=l_prime, phi=phi, l_prime2=partner_level, phi2=partner_angle
                    ),
                )
            )
            jobs.append((Quantity.EXPECT_U, QuantityParams(l_prime=l_prime, phi=phi)))
            jobs.append((Quantity.EXPECT_U2, QuantityParams(l_prime=l_prime, phi=phi)))
            for lam in (1, -1):
                jobs.append(
                    (Quantity.EXPECT_EXPJ, QuantityParams(l_prime=l_prime, phi=phi, lam=lam))
                )
    for l_prime in grid.informational_levels:
        jobs.append((Quantity.EXPECT_U, QuantityParams(l_prime=l_prime)))
        jobs.append((Quantity.EXPECT_U2, QuantityParams(l_prime=l_prime)))
    return jobs


def _periodicity_entries(grid: VerificationGrid, workers: int) -> list[PeriodicityEntry]:
    profiles = [RadialProfile.constant(r) for r in grid.radial_values]
    profiles += [RadialProfile.parse("sin2"), RadialProfile.parse("cos2")]
    entries: list[PeriodicityEntry] = []

    for profile in profiles:
        config = StripConfig(l=grid.strip_offset, profile=profile)
        for kind in StateKind:
            entries += periodicity_report(
                config, grid.periodicity_angles, [FOUR_PI], kind, 0.0, grid.padding, workers
            )
            entries += periodicity_report(
                config, grid.chi_follow_angles, [FOUR_PI], kind, "phi", grid.padding, workers
            )

    # circle periodicity: the cylinder everywhere, sin2 where r vanishes at both ends
    cylinder = StripConfig(l=grid.strip_offset, profile=RadialProfile.constant(0.0))
    entries += periodicity_report(
        cylinder, grid.periodicity_angles, [TWO_PI], padding=grid.padding, workers=workers
    )
    sin2 = StripConfig(l=grid.strip_offset, profile=RadialProfile.parse("sin2"))
    entries += periodicity_report(
        sin2, [0.0], [TWO_PI], StateKind.OPPOSITE_XI, padding=grid.padding, workers=workers
    )
    return entries


def run_verification(grid: VerificationGrid | None = None, workers: int = 1) -> VerificationReport:
    """
    Runs the full suite. Literal-convention flags are informational and never fail the run.
    """
    settings = grid or VerificationGrid()

    residual_jobs = [
        (lp, phi) for lp in settings.residual_levels for phi in settings.residual_angles
    ]
    residuals = run_ordered(
        lambda job: eigenvalue_residual(job[0], job[1], settings.padding), residual_jobs, workers
    )

    betas = [complex(re, im) for re in settings.poisson_real for im in settings.poisson_imag]
    poisson = [
        PoissonCheck(1.0, beta, dev, dev <= POISSON_TOL)
        for beta, dev in zip(
            betas, run_ordered(lambda beta: poisson_check(1.0, beta), betas, workers), strict=True
        )
    ]

    discrepancies = run_ordered(
        lambda job: closed_vs_direct(job[0], job[1], settings.padding, settings.tol),
        _discrepancy_jobs(settings),
        workers,
    )

    report = VerificationReport(
        eigenvalue_residuals=residuals,
        poisson_checks=poisson,
        discrepancies=discrepancies,
        periodicity=_periodicity_entries(settings, workers),
    )
    flagged = sum(1 for entry in discrepancies if entry.flags)
    logger.info(
        "Verification %s: %d residuals, %d Poisson checks, %d discrepancies (%d flagged), "
        "%d periodicity entries",
        "passed" if report.passed else "FAILED",
        len(residuals),
        len(poisson),
        len(discrepancies),
        flagged,
        len(report.periodicity),
    )
    return report
