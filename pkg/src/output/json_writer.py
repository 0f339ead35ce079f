import json
import math
from typing import Any

from .base import Artifact, BaseWriter


def _strict(value: Any) -> Any:
    # JSON has no NaN/Infinity; undefined values become null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _strict(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_strict(item) for item in value]
    return value


class JsonWriter(BaseWriter):
    """
    Nested reports are written as they stand; tables become
    {"meta": {...}, "rows": [{column: value, ...}, ...]}.
    """

    def render(self, artifact: Artifact) -> str:
        if artifact.document is not None:
            payload: dict[str, Any] = artifact.document
        else:
            payload = {
                "meta": artifact.comments,
                "rows": [dict(zip(artifact.columns, row, strict=True)) for row in artifact.rows],
            }
        return json.dumps(_strict(payload), indent=2, allow_nan=False) + "\n"
