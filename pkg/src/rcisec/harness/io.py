"""
Serialization of sweep results and parsing of sweep config files.

CSV layout: one header line, then one line per row, columns ``CSV_COLUMNS``.
Floats carry 17 significant digits and absent cells are ``NaN``, so a
write/read cycle is lossless. Run metadata (which includes wall time) is not
written to the CSV, keeping it byte-stable; it goes to a JSON sidecar.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import fields
from pathlib import Path

from ..channel import SystemConfig
from ..errors import ValidationError
from .sweep import SweepResult, SweepRow, SweepSpec

__all__ = [
    "CSV_COLUMNS",
    "format_float",
    "emit_csv",
    "csv_text",
    "read_csv",
    "emit_json",
    "json_text",
    "write_meta",
    "load_spec_file",
    "parse_spec_text",
]

CSV_COLUMNS = ("axis", "axis_value", "mc_mean", "mc_stderr", "ci95_low", "ci95_high",
               "deq_value", "deq_perfect", "extra")
_FLOAT_COLUMNS = CSV_COLUMNS[1:-1]


def format_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    return format(float(v), ".17g")


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        w.writerow([r.axis] + [format_float(getattr(r, c)) for c in _FLOAT_COLUMNS] + [r.extra])
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> None:
    path = Path(path)
    try:
        path.write_text(csv_text(result), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_csv(path) -> SweepResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_COLUMNS:
        raise ValidationError(f"{path}: unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        kw = dict(zip(CSV_COLUMNS, rec))
        for c in _FLOAT_COLUMNS:
            kw[c] = float(kw[c])
        rows.append(SweepRow(**kw))
    return SweepResult(rows=rows, meta={})


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def json_text(result: SweepResult, include_meta=True) -> str:
    doc = {"rows": [{f.name: getattr(r, f.name) for f in fields(SweepRow)} for r in result.rows]}
    if include_meta:
        doc["meta"] = result.meta
    return json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n"


def emit_json(result: SweepResult, path, include_meta=True) -> None:
    text = json_text(result, include_meta)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path}: {exc.strerror or exc}") from exc


def write_meta(result: SweepResult, path) -> Path:
    """Write ``<path>.meta.json`` next to a CSV."""
    meta_path = Path(str(path) + ".meta.json")
    try:
        meta_path.write_text(json.dumps(_json_safe(result.meta), indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write metadata to {meta_path}: {exc.strerror or exc}") from exc
    return meta_path


# config files ---------------------------------------------------------------

_SCHEMA = {
    "sweep": {"axis", "values", "trials", "seed", "outputs", "normalize", "label"},
    "system": {"M", "K", "rho_db", "tau2"},
    "fdd": {"b"},
    "tdd": {"T", "c"},
}


def _parse_values(text):
    text = text.strip()
    if ":" in text and "," not in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValidationError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    return tuple(float(t) for t in text.replace(",", " ").split())


def parse_spec_text(text: str) -> SweepSpec:
    """Parse an INI-style sweep description.

    Sections ``[sweep]``, ``[system]``, ``[fdd]``, ``[tdd]``; keys are case
    sensitive and anything not in the schema is rejected. ``values`` is a
    comma/space separated list or a ``start:stop:step`` range.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"malformed config: {exc}") from exc
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ValidationError(f"unknown section [{section}]")
        unknown = set(cp[section]) - _SCHEMA[section]
        if unknown:
            raise ValidationError(f"unknown keys in [{section}]: {sorted(unknown)}")
    if not cp.has_section("sweep") or not cp.has_section("system"):
        raise ValidationError("config needs [sweep] and [system] sections")
    sw, sy = cp["sweep"], cp["system"]
    try:
        fixed = SystemConfig.from_db(
            M=int(sy.get("M", "10")), K=int(sy.get("K", "10")),
            rho_db=float(sy.get("rho_db", "20")), tau2=float(sy.get("tau2", "0")),
        )
        kw = dict(
            axis=sw.get("axis", "").strip(),
            values=_parse_values(sw.get("values", "")),
            fixed=fixed,
            trials=int(sw.get("trials", "1000")),
            master_seed=int(sw.get("seed", "0")),
            normalize=sw.get("normalize", "none").strip(),
            label=sw.get("label", "").strip(),
        )
        if "outputs" in sw:
            kw["outputs"] = frozenset(o for o in sw["outputs"].replace(",", " ").split())
        if cp.has_section("fdd"):
            kw["fdd_b"] = float(cp["fdd"]["b"])
        if cp.has_section("tdd"):
            kw["tdd_T"] = int(cp["tdd"]["T"])
            kw["tdd_c"] = float(cp["tdd"]["c"])
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad config value: {exc}") from exc
    return SweepSpec(**kw)


def load_spec_file(path) -> SweepSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_spec_text(text)
