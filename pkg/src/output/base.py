import sys
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from logger import get_logger

logger = get_logger(__name__)

Cell = float | int | str | bool


@dataclass(frozen=True)
class Artifact:
    """
    One output document: provenance comments plus either a table or a nested report.

    Args:
        comments: Ordered key/value provenance lines.
        columns: Column names of the table.
        rows: Table rows, in output order.
        document: Nested report; used instead of the table when set.
    """

    comments: dict[str, str] = field(default_factory=dict)
    columns: tuple[str, ...] = ()
    rows: list[tuple[Cell, ...]] = field(default_factory=list)
    document: dict[str, Any] | None = None


class BaseWriter(ABC):
    """
    Abstract base class for artifact writers.
    """

    @abstractmethod
    def render(self, artifact: Artifact) -> str:
        """
        Serialises the artifact.

        Args:
            artifact: Comments and rows (or a nested document) to serialise.

        Returns:
            The complete file contents.
        """
        pass

    def write(self, artifact: Artifact, path: Path | None = None) -> None:
        """
        Writes the rendered artifact to path, or to stdout when no path is given.
        Raises OSError when the destination is not writable.
        """
        text = self.render(artifact)
        if path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote %d rows to %s", len(artifact.rows), path)
