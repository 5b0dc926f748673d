"""Parsers and emitters for the three measurement file formats.

* canonical document: JSON, ``{"schema_version": 1, "subjects": [...]}``
* profiler CSV: ``subject,et_s,instructions,cycles,cache_accesses,cache_misses``
* synthesis summary: ``key: value`` lines, ``#`` comments

Each parser either returns a complete value or raises ``SchemaError`` with
a location; emitters are exact inverses (floats are written with ``repr``).
"""

import json
import math
import re
import warnings
from dataclasses import dataclass, fields

from .errors import ConflictingMeasurement, SchemaError, UnitMismatch
from .indicators import (
    SOURCES,
    CompositeResult,
    Measurement,
    RankRow,
    RatioTable,
    SubjectRecord,
    catalog_from_dict,
    catalog_to_dict,
    check_positive,
    clamp_value,
    default_li_catalog,
)

SCHEMA_VERSION = 1
SUBJECT_RE = re.compile(r"^[a-z0-9_-]+$")
_INT_RE = re.compile(r"^[0-9]+$")


class UnknownKeyWarning(UserWarning):
    pass


# -- canonical document ------------------------------------------------------

def _expect(cond, message, path, source):
    if not cond:
        raise SchemaError(message, location=path, source=source)


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_canonical(text, catalog=None, clamp_epsilon=None, source=None) -> list:
    """Parse a canonical measurement document into SubjectRecords.

    Units are checked against ``catalog`` (the default LI catalog when None).
    """
    catalog = catalog or default_li_catalog()
    units = {s.id: s.unit for s in catalog.indicators}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, location=f"line {exc.lineno} col {exc.colno}", source=source) from None
    _expect(isinstance(doc, dict), "document must be a JSON object", "$", source)
    _expect(doc.get("schema_version") == SCHEMA_VERSION,
            f"schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}", "$.schema_version", source)
    subjects = doc.get("subjects")
    _expect(isinstance(subjects, list), "subjects must be a list", "$.subjects", source)

    records = []
    seen = set()
    for i, entry in enumerate(subjects):
        path = f"$.subjects[{i}]"
        _expect(isinstance(entry, dict), "subject entry must be an object", path, source)
        sid = entry.get("subject_id")
        _expect(isinstance(sid, str) and sid, "subject_id must be a non-empty string", f"{path}.subject_id", source)
        _expect(sid not in seen, f"subject {sid!r} listed twice", f"{path}.subject_id", source)
        seen.add(sid)
        ms = entry.get("measurements")
        _expect(isinstance(ms, list), "measurements must be a list", f"{path}.measurements", source)
        rec = SubjectRecord(sid)
        for j, m in enumerate(ms):
            mpath = f"{path}.measurements[{j}]"
            _expect(isinstance(m, dict), "measurement must be an object", mpath, source)
            iid = m.get("indicator_id")
            _expect(isinstance(iid, str), "indicator_id must be a string", f"{mpath}.indicator_id", source)
            _expect(iid in units, f"unknown indicator {iid!r}", f"{mpath}.indicator_id", source)
            unit = m.get("unit")
            _expect(isinstance(unit, str), "unit must be a string", f"{mpath}.unit", source)
            if unit != units[iid]:
                raise UnitMismatch(iid, unit, units[iid])
            value = m.get("value")
            _expect(_is_number(value), "value must be a number", f"{mpath}.value", source)
            src = m.get("source", "ingested")
            _expect(src in SOURCES, f"source must be one of {SOURCES}", f"{mpath}.source", source)
            detail = m.get("detail", "")
            _expect(isinstance(detail, str), "detail must be a string", f"{mpath}.detail", source)
            _expect(iid not in rec.measurements, f"indicator {iid!r} given twice", mpath, source)
            value = clamp_value(value, clamp_epsilon, f"{sid}/{iid}")
            rec.measurements[iid] = Measurement(iid, value, src, detail)
        records.append(rec)
    return records


def emit_canonical(records, catalog=None) -> str:
    catalog = catalog or default_li_catalog()
    units = {s.id: s.unit for s in catalog.indicators}
    order = {iid: n for n, iid in enumerate(catalog.indicator_ids())}
    subjects = []
    for rec in records:
        ms = []
        for iid in sorted(rec.measurements, key=lambda k: (order.get(k, len(order)), k)):
            m = rec.measurements[iid]
            if iid not in units:
                raise SchemaError(f"indicator {iid!r} is not in the catalog", location=rec.subject_id)
            ms.append({"indicator_id": iid, "value": m.value, "unit": units[iid],
                       "source": m.source, "detail": m.detail})
        subjects.append({"subject_id": rec.subject_id, "measurements": ms})
    return json.dumps({"schema_version": SCHEMA_VERSION, "subjects": subjects}, indent=2, allow_nan=False) + "\n"


# -- profiler CSV ------------------------------------------------------------

PROFILER_HEADER = ("subject", "et_s", "instructions", "cycles", "cache_accesses", "cache_misses")


@dataclass(frozen=True)
class ProfilerExport:
    subject_id: str
    et_s: float
    instructions: int
    cycles: int
    cache_accesses: int
    cache_misses: int


def _parse_float(cell, row, column, source):
    try:
        v = float(cell)
    except ValueError:
        raise SchemaError(f"{column}: {cell!r} is not a number", location=f"row {row}", source=source) from None
    if not math.isfinite(v) or v <= 0:
        raise SchemaError(f"{column}: {cell!r} must be positive and finite", location=f"row {row}", source=source)
    return v


def _parse_int(cell, row, column, source, positive=True):
    if not _INT_RE.match(cell):
        raise SchemaError(f"{column}: {cell!r} is not a non-negative integer", location=f"row {row}", source=source)
    v = int(cell)
    if positive and v == 0:
        raise SchemaError(f"{column}: must be positive", location=f"row {row}", source=source)
    return v


def parse_profiler_csv(text, source=None) -> list:
    lines = text.splitlines()
    header_row = None
    exports = []
    for row, line in enumerate(lines, 1):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if header_row is None:
            if tuple(cells) != PROFILER_HEADER:
                raise SchemaError(f"header must be {','.join(PROFILER_HEADER)}", location=f"row {row}", source=source)
            header_row = row
            continue
        if len(cells) != len(PROFILER_HEADER):
            raise SchemaError(f"expected {len(PROFILER_HEADER)} columns, got {len(cells)}",
                              location=f"row {row}", source=source)
        subject = cells[0]
        if not SUBJECT_RE.match(subject):
            raise SchemaError(f"subject {subject!r} must match [a-z0-9_-]+", location=f"row {row}", source=source)
        et = _parse_float(cells[1], row, "et_s", source)
        instructions = _parse_int(cells[2], row, "instructions", source)
        cycles = _parse_int(cells[3], row, "cycles", source)
        accesses = _parse_int(cells[4], row, "cache_accesses", source)
        misses = _parse_int(cells[5], row, "cache_misses", source, positive=False)
        if misses > accesses:
            raise SchemaError("cache_misses exceeds cache_accesses", location=f"row {row}", source=source)
        exports.append(ProfilerExport(subject, et, instructions, cycles, accesses, misses))
    if header_row is None:
        raise SchemaError("missing header", location="row 1", source=source)
    return exports


def emit_profiler_csv(exports) -> str:
    out = [",".join(PROFILER_HEADER)]
    for p in exports:
        out.append(f"{p.subject_id},{p.et_s!r},{p.instructions},{p.cycles},{p.cache_accesses},{p.cache_misses}")
    return "\n".join(out) + "\n"


def profiler_to_measurements(p: ProfilerExport, clamp_epsilon=None, detail="") -> list:
    """sw.et, sw.cpi and sw.cmr from one profiler row."""
    check_positive(p.instructions, f"{p.subject_id} instructions")
    check_positive(p.cache_accesses, f"{p.subject_id} cache_accesses")
    cmr = clamp_value(p.cache_misses / p.cache_accesses, clamp_epsilon, f"{p.subject_id} sw.cmr")
    return [
        Measurement("sw.et", p.et_s, "ingested", detail),
        Measurement("sw.cpi", p.cycles / p.instructions, "ingested", detail),
        Measurement("sw.cmr", cmr, "ingested", detail),
    ]


# -- synthesis summary -------------------------------------------------------

@dataclass(frozen=True)
class SynthesisSummary:
    subject_id: str
    fmax_mhz: float
    cycles_per_block: int
    block_bits: int
    lut_count: int
    lr_count: int
    power_mw: float
    pd_ns: float


SYNTHESIS_KEYS = tuple(f.name for f in fields(SynthesisSummary))
_SYNTHESIS_INTS = {"cycles_per_block", "block_bits", "lut_count", "lr_count"}


def parse_synthesis_summary(text, source=None) -> SynthesisSummary:
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if ":" not in stripped:
            raise SchemaError("expected 'key: value'", location=f"line {lineno}", source=source)
        key, value = (part.strip() for part in stripped.split(":", 1))
        if key in raw:
            raise SchemaError(f"duplicate key {key!r}", location=f"line {lineno}", source=source)
        if key not in SYNTHESIS_KEYS:
            warnings.warn(f"{source or '<synthesis>'}:{lineno}: ignoring unknown key {key!r}", UnknownKeyWarning,
                          stacklevel=2)
            continue
        raw[key] = value
        lines[key] = lineno
    for key in SYNTHESIS_KEYS:
        if key not in raw:
            raise SchemaError(f"missing key {key!r}", location=key, source=source)
    sid = raw["subject_id"]
    if not sid:
        raise SchemaError("subject_id is empty", location=f"line {lines['subject_id']}", source=source)
    values = {"subject_id": sid}
    for key in SYNTHESIS_KEYS[1:]:
        row = lines[key]
        if key in _SYNTHESIS_INTS:
            values[key] = _parse_int(raw[key], row, key, source)
        else:
            values[key] = _parse_float(raw[key], row, key, source)
    return SynthesisSummary(**values)


def emit_synthesis_summary(s: SynthesisSummary) -> str:
    out = []
    for key in SYNTHESIS_KEYS:
        v = getattr(s, key)
        out.append(f"{key}: {v!r}" if isinstance(v, float) else f"{key}: {v}")
    return "\n".join(out) + "\n"


def synthesis_to_measurements(s: SynthesisSummary, detail="") -> list:
    """Hardware indicators; ET is per-block latency, TH the sustained bit rate."""
    fmax_hz = check_positive(s.fmax_mhz, f"{s.subject_id} fmax_mhz") * 1e6
    cycles = check_positive(s.cycles_per_block, f"{s.subject_id} cycles_per_block")
    bits = check_positive(s.block_bits, f"{s.subject_id} block_bits")
    return [
        Measurement("hw.et", cycles / fmax_hz, "ingested", detail),
        Measurement("hw.th", bits * fmax_hz / cycles, "ingested", detail),
        Measurement("hw.pd", s.pd_ns, "ingested", detail),
        Measurement("hw.lut", s.lut_count, "ingested", detail),
        Measurement("hw.lr", s.lr_count, "ingested", detail),
        Measurement("hw.pc", check_positive(s.power_mw, f"{s.subject_id} power_mw") / 1000.0, "ingested", detail),
    ]


# -- merging -----------------------------------------------------------------

def merge_records(a, b) -> list:
    """Union per subject; differing values for one indicator are an error."""
    merged = {}
    for rec in list(a) + list(b):
        target = merged.setdefault(rec.subject_id, SubjectRecord(rec.subject_id))
        for iid, m in rec.measurements.items():
            prev = target.measurements.get(iid)
            if prev is None:
                target.measurements[iid] = m
            elif prev.value != m.value:
                raise ConflictingMeasurement(rec.subject_id, iid, prev.value, m.value)
    return list(merged.values())



# -- results document (compose -> report) -------------------------------------

def emit_results(catalog, table, results, ranking) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "results",
        "reference_id": table.reference_id,
        "catalog": catalog_to_dict(catalog),
        "ratios": [{"subject_id": s, "indicator_id": i, "ratio": r} for (s, i), r in table.entries.items()],
        "results": [
            {"subject_id": r.subject_id, "cmi": r.cmi, "ratio_count": r.ratio_count,
             "profile_products": dict(r.profile_products), "included_indicators": list(r.included_indicators),
             "warnings": list(r.warnings)}
            for r in results
        ],
        "ranking": [{"rank": row.rank, "subject_id": row.subject_id, "cmi": row.cmi} for row in ranking],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def parse_results(text, source=None):
    """Inverse of ``emit_results``: returns (catalog, table, results, ranking)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, location=f"line {exc.lineno} col {exc.colno}", source=source) from None
    _expect(isinstance(doc, dict) and doc.get("kind") == "results", "not a results document", "$", source)
    _expect(doc.get("schema_version") == SCHEMA_VERSION, "unsupported schema_version", "$.schema_version", source)
    try:
        catalog = catalog_from_dict(doc["catalog"])
        table = RatioTable(doc["reference_id"])
        for e in doc["ratios"]:
            table.entries[(e["subject_id"], e["indicator_id"])] = check_positive(e["ratio"], "ratio")
        results = [
            CompositeResult(r["subject_id"], dict(r["profile_products"]), int(r["ratio_count"]),
                            check_positive(r["cmi"], "cmi"), tuple(r["included_indicators"]),
                            tuple(r.get("warnings", ())))
            for r in doc["results"]
        ]
        ranking = [RankRow(int(r["rank"]), r["subject_id"], float(r["cmi"])) for r in doc["ranking"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed results document: {exc!r}", location="$", source=source) from None
    return catalog, table, results, ranking
