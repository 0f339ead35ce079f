"""
Artifact writers for the CLI: CSV tables and JSON reports.
"""

from .base import Artifact, BaseWriter, Cell
from .csv_writer import CsvWriter
from .json_writer import JsonWriter

__all__ = ["Artifact", "BaseWriter", "Cell", "CsvWriter", "JsonWriter"]
