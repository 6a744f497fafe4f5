"""JSON records of coefficient sets.

A coefficient set is written as

    {"truncation": {"j_min": ..., "j_max": ..., "n_max": ...},
     "coefficients": [{"j": ..., "k": [...], "n": [...], "re": ..., "im": ...}, ...]}

with the records sorted by (j, k, n).
"""

from __future__ import annotations

import json
import math
from typing import Any, Dict, List, Mapping

from brushlab.brushlet import BrushletIndex
from brushlab.error import BrushlabError, ConfigError
from brushlab.transform import CoefficientSet, Truncation


def marshal_index(idx: BrushletIndex) -> Dict[str, Any]:
    return {"j": idx.j, "k": list(idx.k), "n": list(idx.n)}


def marshal_coefficients(coeffs: CoefficientSet) -> Dict[str, Any]:
    t = coeffs.truncation
    records: List[Dict[str, Any]] = []
    for idx, value in coeffs.items():
        record = marshal_index(idx)
        record["re"] = value.real
        record["im"] = value.imag
        records.append(record)
    return {
        "truncation": {"j_min": t.j_min, "j_max": t.j_max, "n_max": t.n_max},
        "coefficients": records,
    }


def _int(record: Mapping[str, Any], key: str) -> int:
    value = record.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _ints(record: Mapping[str, Any], key: str) -> List[int]:
    value = record.get(key)
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in value
    ):
        raise ConfigError(f"{key} must be a list of integers, got {value!r}")
    return value


def _number(record: Mapping[str, Any], key: str) -> float:
    value = record.get(key, 0.0)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    return float(value)


def unmarshal_coefficients(data: Any) -> CoefficientSet:
    """Raises:
    ConfigError: If a record is malformed, lies outside the truncation or
        repeats an index.
    """
    if not isinstance(data, Mapping):
        raise ConfigError("coefficient set must be a JSON object")
    truncation = data.get("truncation")
    records = data.get("coefficients")
    if not isinstance(truncation, Mapping) or not isinstance(records, list):
        raise ConfigError("coefficient set needs 'truncation' and 'coefficients'")
    coefficients = {}
    try:
        t = Truncation(
            _int(truncation, "j_min"), _int(truncation, "j_max"), _int(truncation, "n_max")
        )
        for record in records:
            if not isinstance(record, Mapping):
                raise ConfigError(f"coefficient record must be an object, got {record!r}")
            idx = BrushletIndex(
                _int(record, "j"), tuple(_ints(record, "k")), tuple(_ints(record, "n"))
            )
            if idx in coefficients:
                raise ConfigError(f"duplicate coefficient {idx}")
            coefficients[idx] = complex(_number(record, "re"), _number(record, "im"))
        return CoefficientSet(coefficients, t)
    except ConfigError:
        raise
    except BrushlabError as e:
        raise ConfigError(f"invalid coefficient set: {e}") from e


def dumps(coeffs: CoefficientSet) -> str:
    return json.dumps(marshal_coefficients(coeffs), sort_keys=True)


def loads(text: str) -> CoefficientSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"coefficient set is not valid JSON: {e}") from e
    return unmarshal_coefficients(data)


def load(path: str) -> CoefficientSet:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read coefficient set {path}: {e}") from e
    return loads(text)
