import math
from typing import Any

import numpy as np
from pydantic import ValidationError

from config import VERSION, Command, OutputFormat, RunConfig
from errors import MobiusError, UndefinedMomentsError
from geometry import level_at, level_crossings, sample_trajectory
from logger import get_logger
from output import Artifact, BaseWriter, Cell, CsvWriter, JsonWriter
from runner import run_ordered
from states import CSParams, StateKind, build_cs, build_state, resolve_chi
from uncertainty import delta2_J, delta2_phi, engine_measures, heisenberg_check
from verify import VerificationGrid, periodicity_report, run_verification

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

TRAJECTORY_COLUMNS = ("phi", "x", "y", "z", "r", "l_prime")
SWEEP_COLUMNS = ("phi", "l_prime", "d2J", "d2phi", "sum", "heis_lhs", "heis_rhs")
PERIODICITY_COLUMNS = ("profile", "phi0", "period", "fidelity", "pass")

# l' at which the literal-convention sum rule |l' - 1| + 1/2 is minimal
SUM_RULE_MINIMUM_LEVEL = 1.0


class RunOrchestrator:
    """
    Runs one CLI command end to end.

    Pipeline:
    1. Expand the RunConfig into an ordered list of evaluation points
    2. Evaluate the points (optionally on worker threads, results kept in input order)
    3. Serialise the rows with provenance comments
    4. Write the artifact to the output path or stdout
    """

    def __init__(self, config: RunConfig):
        self.config = config
        json_output = config.format is OutputFormat.JSON
        self.writer: BaseWriter = JsonWriter() if json_output else CsvWriter()

    def run(self) -> int:
        """
        Dispatches on the command and maps failures onto exit codes.

        Returns:
            0 on success, 1 when verification fails, 2 on usage or I/O errors.
        """
        handlers = {
            Command.TRAJECTORY: self.cmd_trajectory,
            Command.SWEEP: self.cmd_sweep,
            Command.PERIODICITY: self.cmd_periodicity,
            Command.VERIFY: self.cmd_verify,
        }
        logger.info("Running '%s' (config %s)", self.config.command, self.config.digest()[:12])
        try:
            return handlers[self.config.command]()
        except OSError as e:
            logger.error("Cannot write output: %s", str(e))
            return EXIT_USAGE
        except (MobiusError, ValidationError) as e:
            logger.error("%s: %s", type(e).__name__, str(e))
            return EXIT_USAGE

    def _comments(self) -> dict[str, str]:
        cfg = self.config
        return {
            "version": VERSION,
            "command": cfg.command.value,
            "convention": cfg.convention.value,
            "state": cfg.state.value,
            "tol": format(cfg.tol, "g"),
            "config_blake3": cfg.digest(),
        }

    def _angles(self) -> list[float]:
        cfg = self.config
        return [float(phi) for phi in np.linspace(cfg.phi_min, cfg.phi_max, cfg.steps)]

    def _emit(self, artifact: Artifact) -> None:
        self.writer.write(artifact, self.config.output)

    def cmd_trajectory(self) -> int:
        cfg = self.config
        points = sample_trajectory(cfg.strip, cfg.phi_min, cfg.phi_max, cfg.steps)
        rows: list[tuple[Cell, ...]] = [(p.phi, p.x, p.y, p.z, p.r, p.l_prime) for p in points]
        self._emit(Artifact(self._comments(), TRAJECTORY_COLUMNS, rows))
        logger.info("Trajectory: %d points on %s", len(rows), cfg.profile.label)
        return EXIT_OK

    def _sweep_points(self) -> list[tuple[float, float]]:
        cfg = self.config
        angles = self._angles()
        if cfg.lp is not None:
            return [(phi, l_prime) for l_prime in cfg.lp for phi in angles]
        strip = cfg.strip
        return [(phi, level_at(strip, phi)) for phi in angles]

    def _sweep_row(self, point: tuple[float, float]) -> tuple[Cell, ...]:
        cfg = self.config
        phi, l_prime = point
        try:
            if cfg.state is StateKind.CS:
                state = build_cs(CSParams(l_prime=l_prime, phi=phi), cfg.padding, scaled=True)
                d2_j = delta2_J(l_prime, cfg.convention)
                d2_phi = delta2_phi(l_prime, cfg.convention)
            else:
                chi = resolve_chi(cfg.chi, phi)
                state = build_state(
                    cfg.state, l_prime, phi, chi, padding=cfg.padding, scaled=True
                )
                d2_j, d2_phi = engine_measures(state)
            heis = heisenberg_check(state)
        except UndefinedMomentsError:
            logger.warning("Zero state at phi=%g, l'=%g; row left undefined", phi, l_prime)
            return (phi, l_prime, math.nan, math.nan, math.nan, math.nan, math.nan)
        return (phi, l_prime, d2_j, d2_phi, d2_j + d2_phi, heis.lhs, heis.rhs)

    def cmd_sweep(self) -> int:
        cfg = self.config
        rows = run_ordered(self._sweep_row, self._sweep_points(), cfg.workers)

        comments = self._comments()
        if cfg.lp is None:
            crossings = level_crossings(
                cfg.strip, SUM_RULE_MINIMUM_LEVEL, cfg.phi_min, cfg.phi_max
            )
            comments["level_crossings"] = ";".join(format(phi, ".17g") for phi in crossings)

        self._emit(Artifact(comments, SWEEP_COLUMNS, rows))
        logger.info("Sweep: %d rows (%s, %s)", len(rows), cfg.state, cfg.convention)
        return EXIT_OK

    def cmd_periodicity(self) -> int:
        cfg = self.config
        entries = periodicity_report(
            cfg.strip,
            self._angles(),
            cfg.period,
            cfg.state,
            cfg.chi,
            cfg.padding,
            cfg.workers,
        )
        rows: list[tuple[Cell, ...]] = [
            (e.profile, e.phi0, e.period, e.fidelity, e.passed) for e in entries
        ]
        self._emit(Artifact(self._comments(), PERIODICITY_COLUMNS, rows))
        logger.info(
            "Periodicity: %d/%d entries pass", sum(e.passed for e in entries), len(entries)
        )
        return EXIT_OK

    def cmd_verify(self) -> int:
        cfg = self.config
        grid = VerificationGrid(padding=cfg.padding, tol=cfg.tol)
        report = run_verification(grid, cfg.workers)
        document: dict[str, Any] = report.to_dict()
        # the report is nested, so it is always JSON
        JsonWriter().write(Artifact(self._comments(), document=document), cfg.output)
        return EXIT_OK if report.passed else EXIT_FAILED
