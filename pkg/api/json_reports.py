"""
JSON report documents for verify, analyze and window runs.

Reports keep insertion order and are written with two-space
indentation and a trailing newline; NaN and infinity are rejected.
"""

import json
from typing import Any, Dict

import numpy as np

from processors.sweep_engine import Provenance


def _plain(value: Any) -> Any:
    """Convert numpy scalars, arrays and tuples into JSON-native values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def build_report(kind: str, body: Dict[str, Any], provenance: Provenance) -> Dict[str, Any]:
    report = {
        "tool": provenance.tool,
        "version": provenance.version,
        "kind": kind,
    }
    if provenance.timestamp:
        report["generated"] = provenance.timestamp
    report.update(body)
    return report


def dumps(report: Dict[str, Any]) -> bytes:
    """Serialize a report; raises ValueError on NaN or infinity"""
    return (json.dumps(_plain(report), indent=2, allow_nan=False, ensure_ascii=False) + "\n").encode("utf-8")
