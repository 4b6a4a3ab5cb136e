"""
Canonical report emission.

Report bodies are rendered with sorted keys, LF endings and a trailing
newline; rationals become "num/den" strings and floats fixed 6-decimal
strings, so identical inputs give byte-identical files.
"""
import csv
import hashlib
import io
import json
import os
import sys
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from src.api.schemas import ReportModel
from src.core.config import CONF, VERSION, Config


def to_plain(obj: Any) -> Any:
    """Replace values JSON cannot carry canonically."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return f"{obj:.6f}"
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if hasattr(obj, "item"):
        return to_plain(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def input_hash(inputs: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(inputs).encode("utf-8")).hexdigest()


def provenance(conf: Config = CONF) -> Dict[str, Any]:
    return {"version": VERSION, "seed": conf.seed, "budget": conf.budget, "threads": conf.threads}


def build_report(command: str, inputs: Dict[str, Any], results: Dict[str, Any], status: str = "OK",
                 conf: Config = CONF, wall_time: Optional[float] = None) -> Dict[str, Any]:
    report = ReportModel(
        command=command,
        inputs=to_plain(inputs),
        input_hash=input_hash(inputs),
        results=to_plain(results),
        provenance=provenance(conf),
        status=status,
        wall_time=None if wall_time is None else f"{wall_time:.6f}",
    )
    body = report.dict()
    if body["wall_time"] is None:
        del body["wall_time"]
    return body


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return None
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def write_json_report(report_obj: Dict[str, Any], path: Optional[str] = None):
    text = canonical_json(report_obj)
    f = _open_out(path)
    if f is None:
        sys.stdout.write(text)
        return
    with f:
        f.write(text)


def csv_text(rows: Iterable[Dict[str, Any]]) -> str:
    """One row per parameter point; nested values are embedded as compact JSON."""
    rows = [to_plain(r) for r in rows]
    fields: List[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v, sort_keys=True, separators=(",", ":"))
                         if isinstance(v, (dict, list)) else v for k, v in row.items()})
    return buf.getvalue()


def write_csv_rows(rows: Iterable[Dict[str, Any]], path: Optional[str] = None):
    text = csv_text(rows)
    f = _open_out(path)
    if f is None:
        sys.stdout.write(text)
        return
    with f:
        f.write(text)
