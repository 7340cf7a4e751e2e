from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy
import pandas

# Seventeen significant digits round-trip every double.
CSV_FLOAT_FORMAT = "%.17g"


def _jsonable(value: Any) -> Any:
    if isinstance(value, numpy.ndarray):
        return value.tolist()
    if isinstance(value, numpy.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable.")


def dumps_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n"


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """
    Write `payload` as JSON with sorted keys, so that equal payloads give
    byte-identical files.
    """
    path = Path(path)
    path.write_text(dumps_json(payload), encoding="utf-8")
    return path


def write_csv(path: Union[str, Path], frame: pandas.DataFrame) -> Path:
    path = Path(path)
    frame.to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
    )
    return path
