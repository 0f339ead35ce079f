"""
Run configuration: command-line flags, the key=value config file, and the validated
RunConfig they produce. Precedence is defaults < config file < flags.
"""

import argparse
import json
import math
from collections.abc import Sequence
from enum import StrEnum
from pathlib import Path
from typing import Any, Self

import blake3
from dotenv import dotenv_values
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from errors import ArgumentError, ConfigError
from geometry import RadialProfile, StripConfig
from logger import get_logger
from states import CHI_FOLLOWS_PHI, ChiRule, StateKind
from uncertainty import Convention
from verify import DISCREPANCY_TOL

logger = get_logger(__name__)

VERSION = "0.1.0"

# fields that never change the bytes of an artifact
PROVENANCE_EXCLUDE = frozenset({"output", "workers", "verbose"})


class Command(StrEnum):
    TRAJECTORY = "trajectory"
    SWEEP = "sweep"
    PERIODICITY = "periodicity"
    VERIFY = "verify"


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"


def parse_angle(token: str) -> float:
    """
    Reads '<k>pi', 'pi', '-pi' or a plain number as radians.
    """
    text = token.strip().lower().replace("π", "pi")
    if not text:
        raise ArgumentError("empty angle token")
    if text.endswith("pi"):
        factor = text[:-2].rstrip("*")
        if factor in ("", "+"):
            return math.pi
        if factor == "-":
            return -math.pi
        try:
            return float(factor) * math.pi
        except ValueError as e:
            raise ArgumentError(f"invalid angle token '{token}'") from e
    try:
        return float(text)
    except ValueError as e:
        raise ArgumentError(f"invalid angle token '{token}'") from e


def _float_list(value: Any, parse: Any = float) -> Any:
    if isinstance(value, str):
        tokens = [token for token in value.split(",") if token.strip()]
        if not tokens:
            raise ValueError("expected a comma-separated list of values")
        return tuple(parse(token) for token in tokens)
    if isinstance(value, int | float):
        return (float(value),)
    return value


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Command
    l: float = 0.0  # noqa: E741
    profile: RadialProfile = RadialProfile()
    phi_min: float = 0.0
    phi_max: float = 4.0 * math.pi
    steps: int = Field(default=101, ge=1)
    lp: tuple[float, ...] | None = None
    convention: Convention = Convention.NORMALIZED
    state: StateKind = StateKind.CS
    chi: ChiRule = 0.0
    period: tuple[float, ...] = (2.0 * math.pi, 4.0 * math.pi)
    tol: float = Field(default=DISCREPANCY_TOL, gt=0.0)
    format: OutputFormat = OutputFormat.CSV
    output: Path | None = None
    padding: int | None = Field(default=None, ge=0)
    workers: int = Field(default=1, ge=1)
    verbose: bool = False

    @field_validator("profile", mode="before")
    @classmethod
    def _parse_profile(cls, value: Any) -> Any:
        return RadialProfile.parse(value) if isinstance(value, str) else value

    @field_validator("phi_min", "phi_max", mode="before")
    @classmethod
    def _parse_angle(cls, value: Any) -> Any:
        return parse_angle(value) if isinstance(value, str) else value

    @field_validator("lp", mode="before")
    @classmethod
    def _parse_levels(cls, value: Any) -> Any:
        return _float_list(value)

    @field_validator("period", mode="before")
    @classmethod
    def _parse_periods(cls, value: Any) -> Any:
        return _float_list(value, parse_angle)

    @field_validator("chi", mode="before")
    @classmethod
    def _parse_chi(cls, value: Any) -> Any:
        if isinstance(value, str):
            token = value.strip().lower()
            return CHI_FOLLOWS_PHI if token == CHI_FOLLOWS_PHI else parse_angle(token)
        return value

    @field_validator("l", "phi_min", "phi_max", "tol")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("value must be finite")
        return value

    @field_validator("lp", "period")
    @classmethod
    def _finite_values(cls, value: tuple[float, ...] | None) -> tuple[float, ...] | None:
        if value is not None and not all(math.isfinite(v) for v in value):
            raise ValueError("every value must be finite")
        return value

    @field_validator("chi")
    @classmethod
    def _finite_chi(cls, value: ChiRule) -> ChiRule:
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("chi must be finite or 'phi'")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        if self.phi_min > self.phi_max:
            raise ValueError(f"empty angle range [{self.phi_min}, {self.phi_max}]")
        needs_grid = self.command is Command.TRAJECTORY or (
            self.command is Command.SWEEP and self.lp is None
        )
        if needs_grid and self.steps < 2:
            raise ValueError(f"{self.command} needs at least 2 steps without an l' override")
        if self.steps >= 2 and self.phi_min == self.phi_max:
            raise ValueError("several steps need phi-min < phi-max")
        if (
            self.command is Command.SWEEP
            and self.state is not StateKind.CS
            and self.convention is not Convention.NORMALIZED
        ):
            raise ValueError("superposition sweeps are measured on the engine; use normalized")
        return self

    @property
    def strip(self) -> StripConfig:
        return StripConfig(l=self.l, profile=self.profile)

    def digest(self) -> str:
        """BLAKE3 of the canonical JSON of every setting that shapes the output."""
        data = self.model_dump(mode="json", exclude=set(PROVENANCE_EXCLUDE))
        data["profile"] = self.profile.label
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return blake3.blake3(canonical.encode("utf-8")).hexdigest()


# flag name -> help text; config-file keys are the same names
FLAGS: dict[str, str] = {
    "command": "trajectory | sweep | periodicity | verify",
    "l": "axial offset of the strip",
    "profile": "radial profile: const:<r> | sin2 | cos2",
    "phi-min": "first strip angle (radians, accepts e.g. 2pi)",
    "phi-max": "last strip angle (radians, accepts e.g. 4pi)",
    "steps": "number of angle samples",
    "lp": "comma-separated l' values overriding the geometry",
    "convention": "closed-form convention: normalized | paper",
    "state": "cs | scs-angle | scs-xi | scs-xi-minus",
    "chi": "superposition phase in radians, or 'phi' to follow the strip angle",
    "period": "comma-separated periods, e.g. '2pi,4pi'",
    "tol": "relative tolerance for closed-form discrepancies",
    "format": "csv | json",
    "output": "output path (stdout when omitted)",
    "padding": "coherent-state window padding (default from the tail tolerance)",
    "workers": "parallel workers; never changes the output bytes",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mobiuscs",
        description="Coherent states on a Möbius strip: trajectories, sweeps and checks.",
    )
    for name, help_text in FLAGS.items():
        parser.add_argument(f"--{name}", default=None, help=help_text)
    parser.add_argument("--config", type=Path, default=None, help="key=value config file")
    parser.add_argument("--verbose", action="store_true", default=None, help="debug logging")
    return parser


def read_config_file(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    values = dotenv_values(path)
    known = set(FLAGS) | {"verbose"}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    missing = sorted(key for key, value in values.items() if value is None)
    if missing:
        raise ConfigError(f"config keys without a value in {path}: {', '.join(missing)}")

    logger.debug("Read %d settings from %s", len(values), path)
    return {key: value for key, value in values.items() if value is not None}


def load_config(argv: Sequence[str] | None = None) -> RunConfig:
    """
    Parses flags, merges the optional config file beneath them and validates the result.

    Raises:
        ConfigError: On unknown keys, unreadable files or invalid values.
    """
    args = vars(build_parser().parse_args(argv))
    config_path: Path | None = args.pop("config")

    raw: dict[str, Any] = {}
    if config_path is not None:
        raw.update(read_config_file(config_path))
    raw.update({key.replace("_", "-"): value for key, value in args.items() if value is not None})

    try:
        fields = {key.replace("-", "_"): value for key, value in raw.items()}
        return RunConfig.model_validate(fields)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"invalid run configuration: {details}") from e
