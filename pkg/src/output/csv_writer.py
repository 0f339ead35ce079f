import csv
import io

from .base import Artifact, BaseWriter, Cell


def format_cell(value: Cell) -> str:
    """Floats at 17 significant digits, booleans as true/false."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


class CsvWriter(BaseWriter):
    """
    Plot-ready CSV: '#'-prefixed provenance lines, then the header and rows.
    """

    def render(self, artifact: Artifact) -> str:
        buffer = io.StringIO()
        for key, value in artifact.comments.items():
            buffer.write(f"# {key}={value}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(artifact.columns)
        for row in artifact.rows:
            writer.writerow([format_cell(cell) for cell in row])
        return buffer.getvalue()
