"""Indicator catalog, ratio normalisation and geometric-mean composition.

Every measurement is turned into a dimensionless ratio against a reference
subject, oriented so that a ratio above 1 always means "better than the
reference". A profile contributes the product of its ratios; the combined
indicator (CMI) is the geometric mean over every ratio a subject has, which
for the default catalog is the ten-ratio Lightness Indicator.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import NamedTuple

from .errors import (
    ConflictingMeasurement,
    DuplicateSubject,
    EmptyProfileForSubject,
    EmptyRecord,
    MissingReferenceMeasurement,
    NonPositiveMeasurement,
    SchemaError,
    UnknownReference,
)

SOURCES = ("measured", "ingested", "fixture")


class ClampWarning(UserWarning):
    """A non-positive value was raised to the configured clamp floor."""


class Directionality(enum.Enum):
    HIGHER_IS_BETTER = "higher"
    LOWER_IS_BETTER = "lower"


@dataclass(frozen=True)
class IndicatorSpec:
    id: str
    name: str
    unit: str
    directionality: Directionality
    profile_id: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("indicator id must be non-empty")
        if not self.unit:
            raise ValueError(f"indicator {self.id!r} has an empty unit")
        if not isinstance(self.directionality, Directionality):
            raise TypeError(f"indicator {self.id!r}: directionality must be a Directionality")


@dataclass(frozen=True)
class ProfileSpec:
    id: str
    name: str
    indicator_ids: tuple

    def __post_init__(self):
        object.__setattr__(self, "indicator_ids", tuple(self.indicator_ids))
        if not self.indicator_ids:
            raise ValueError(f"profile {self.id!r} has no indicators")
        if len(set(self.indicator_ids)) != len(self.indicator_ids):
            raise ValueError(f"profile {self.id!r} lists an indicator twice")


def check_positive(value, what="measurement") -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise NonPositiveMeasurement(value, what) from None
    if isinstance(value, bool) or not math.isfinite(v) or v <= 0.0:
        raise NonPositiveMeasurement(value, what)
    return v


def clamp_value(value, epsilon=None, what="measurement") -> float:
    """Validate ``value``; with ``epsilon`` set, raise values <= 0 to it instead.

    NaN and infinities are never clamped.
    """
    if epsilon is not None:
        v = float(value)
        if math.isfinite(v) and v <= 0.0:
            eps = check_positive(epsilon, "clamp epsilon")
            warnings.warn(f"{what} {value!r} clamped to {eps!r}", ClampWarning, stacklevel=2)
            return eps
    return check_positive(value, what)


@dataclass(frozen=True)
class Measurement:
    indicator_id: str
    value: float
    source: str = "measured"
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "value", check_positive(self.value, f"measurement of {self.indicator_id!r}"))
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")


@dataclass
class SubjectRecord:
    subject_id: str
    measurements: dict = field(default_factory=dict)

    @classmethod
    def from_measurements(cls, subject_id, measurements):
        rec = cls(subject_id)
        for m in measurements:
            prev = rec.measurements.get(m.indicator_id)
            if prev is not None:
                raise ConflictingMeasurement(subject_id, m.indicator_id, prev.value, m.value)
            rec.measurements[m.indicator_id] = m
        return rec


class Catalog(NamedTuple):
    indicators: tuple
    profiles: tuple

    def indicator(self, indicator_id) -> IndicatorSpec:
        for spec in self.indicators:
            if spec.id == indicator_id:
                return spec
        raise KeyError(indicator_id)

    def indicator_ids(self) -> list:
        return [spec.id for spec in self.indicators]

    def validate(self):
        ids = self.indicator_ids()
        if len(set(ids)) != len(ids):
            raise ValueError("indicator ids must be unique within a catalog")
        owner = {}
        for p in self.profiles:
            for iid in p.indicator_ids:
                if iid not in ids:
                    raise ValueError(f"profile {p.id!r} references unknown indicator {iid!r}")
                if iid in owner:
                    raise ValueError(f"indicator {iid!r} belongs to profiles {owner[iid]!r} and {p.id!r}")
                owner[iid] = p.id
        for spec in self.indicators:
            if owner.get(spec.id) != spec.profile_id:
                raise ValueError(f"indicator {spec.id!r} is not listed by its profile {spec.profile_id!r}")
        return self


def default_li_catalog() -> Catalog:
    """The ten-indicator Lightness Indicator catalog (4 software, 6 hardware)."""
    lower, higher = Directionality.LOWER_IS_BETTER, Directionality.HIGHER_IS_BETTER
    rows = [
        ("sw.et", "Software execution time", "s", lower, "sw"),
        ("sw.th", "Software throughput", "bps", higher, "sw"),
        ("sw.cpi", "Clock cycles per instruction", "cycles/instr", lower, "sw"),
        ("sw.cmr", "Cache miss ratio", "dimensionless", lower, "sw"),
        ("hw.et", "Hardware execution time", "s", lower, "hw"),
        ("hw.th", "Hardware throughput", "bps", higher, "hw"),
        ("hw.pd", "Propagation delay", "ns", lower, "hw"),
        ("hw.lut", "Look-up tables", "count", lower, "hw"),
        ("hw.lr", "Logic registers", "count", lower, "hw"),
        ("hw.pc", "Power consumption", "W", lower, "hw"),
    ]
    indicators = tuple(IndicatorSpec(*row) for row in rows)
    profiles = (
        ProfileSpec("sw", "Software profile", tuple(r[0] for r in rows if r[4] == "sw")),
        ProfileSpec("hw", "Hardware profile", tuple(r[0] for r in rows if r[4] == "hw")),
    )
    return Catalog(indicators, profiles).validate()


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "indicators": [
            {"id": s.id, "name": s.name, "unit": s.unit, "directionality": s.directionality.value,
             "profile_id": s.profile_id}
            for s in catalog.indicators
        ],
        "profiles": [{"id": p.id, "name": p.name, "indicator_ids": list(p.indicator_ids)} for p in catalog.profiles],
    }


def catalog_from_dict(doc) -> Catalog:
    try:
        indicators = tuple(
            IndicatorSpec(d["id"], d["name"], d["unit"], Directionality(d["directionality"]), d["profile_id"])
            for d in doc["indicators"]
        )
        profiles = tuple(ProfileSpec(d["id"], d["name"], tuple(d["indicator_ids"])) for d in doc["profiles"])
        return Catalog(indicators, profiles).validate()
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"invalid catalog: {exc}", location="catalog") from None


def normalize_ratio(value, reference, directionality: Directionality) -> float:
    v = check_positive(value, "value")
    r = check_positive(reference, "reference")
    if directionality is Directionality.HIGHER_IS_BETTER:
        return v / r
    return r / v


@dataclass
class RatioTable:
    reference_id: str
    entries: dict = field(default_factory=dict)

    def subjects(self) -> list:
        seen = {}
        for sid, _ in self.entries:
            seen.setdefault(sid, None)
        return list(seen)

    def ratios_for(self, subject_id) -> dict:
        return {iid: r for (sid, iid), r in self.entries.items() if sid == subject_id}


def build_ratio_table(subjects, reference_id, catalog) -> RatioTable:
    if isinstance(catalog, Catalog):
        catalog = catalog.indicators
    specs = {s.id: s for s in catalog}
    by_id = {}
    for rec in subjects:
        if rec.subject_id in by_id:
            raise DuplicateSubject(rec.subject_id)
        by_id[rec.subject_id] = rec
    if reference_id not in by_id:
        raise UnknownReference(reference_id)
    ref = by_id[reference_id].measurements
    table = RatioTable(reference_id)
    for rec in subjects:
        for iid, m in rec.measurements.items():
            if iid not in specs:
                raise SchemaError(f"indicator {iid!r} is not in the catalog", location=rec.subject_id)
            if iid not in ref:
                raise MissingReferenceMeasurement(iid)
            if rec.subject_id == reference_id:
                # x/x is 1.0 in IEEE arithmetic as well, but keep it explicit
                table.entries[(rec.subject_id, iid)] = 1.0
            else:
                table.entries[(rec.subject_id, iid)] = normalize_ratio(
                    m.value, ref[iid].value, specs[iid].directionality
                )
    return table


def _log_sum(ratios) -> float:
    return math.fsum(math.log(r) for r in ratios)


def compose_profile(table: RatioTable, subject_id, profile: ProfileSpec) -> float:
    """Product of the subject's ratios within one profile, computed in log space."""
    ratios = [table.entries[(subject_id, iid)] for iid in profile.indicator_ids if (subject_id, iid) in table.entries]
    if not ratios:
        raise EmptyProfileForSubject(subject_id, profile.id)
    return math.exp(_log_sum(ratios))


@dataclass(frozen=True)
class CompositeResult:
    subject_id: str
    profile_products: dict
    ratio_count: int
    cmi: float
    included_indicators: tuple
    warnings: tuple = ()


def compose_cmi(table: RatioTable, subject_id, profiles) -> CompositeResult:
    """Geometric mean of every ratio the subject has across ``profiles``.

    Missing indicators are left out and the root shrinks to the number of
    ratios actually present; each omission is recorded in ``warnings``.
    """
    logs = []
    included = []
    products = {}
    notes = []
    for profile in profiles:
        present = [iid for iid in profile.indicator_ids if (subject_id, iid) in table.entries]
        missing = [iid for iid in profile.indicator_ids if (subject_id, iid) not in table.entries]
        if missing:
            notes.append(f"{subject_id}: missing {', '.join(missing)} in profile {profile.id}")
        if not present:
            continue
        profile_logs = [math.log(table.entries[(subject_id, iid)]) for iid in present]
        products[profile.id] = math.exp(math.fsum(profile_logs))
        logs.extend(profile_logs)
        included.extend(present)
    if not logs:
        raise EmptyRecord(subject_id)
    cmi = math.exp(math.fsum(logs) / len(logs))
    return CompositeResult(subject_id, products, len(logs), cmi, tuple(included), tuple(notes))


def cmi_from_profile_products(result: CompositeResult) -> float:
    """Two-stage route: multiply the profile products, then take the l-th root."""
    return math.exp(math.fsum(math.log(p) for p in result.profile_products.values()) / result.ratio_count)


class RankRow(NamedTuple):
    rank: int
    subject_id: str
    cmi: float


def rank(results) -> list:
    """Competition ranking (1, 1, 3), best first; ties broken by subject id.

    Accepts CompositeResults or plain ``(subject_id, cmi)`` pairs.
    """
    pairs = []
    for item in results:
        if isinstance(item, CompositeResult):
            pairs.append((item.subject_id, item.cmi))
        else:
            sid, cmi = item
            pairs.append((sid, float(cmi)))
    if not pairs:
        raise ValueError("rank() needs at least one result")
    seen = set()
    for sid, _ in pairs:
        if sid in seen:
            raise DuplicateSubject(sid)
        seen.add(sid)
    ordered = sorted(pairs, key=lambda p: (-p[1], p[0]))
    rows = []
    for pos, (sid, cmi) in enumerate(ordered):
        r = rows[-1].rank if rows and rows[-1].cmi == cmi else pos + 1
        rows.append(RankRow(r, sid, cmi))
    return rows


def compose_all(subjects, reference_id, catalog: Catalog):
    """Ratio table, per-subject results and ranking in one call."""
    table = build_ratio_table(subjects, reference_id, catalog)
    results = [compose_cmi(table, rec.subject_id, catalog.profiles) for rec in subjects]
    return table, results, rank(results)


def format_fixed(x: float, places: int = 2) -> str:
    """Round half-to-even on the shortest decimal form of ``x``."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_EVEN))


def format_sig(x: float, digits: int = 4) -> str:
    d = Decimal(repr(float(x)))
    if d == 0:
        return "0"
    q = Decimal(1).scaleb(d.adjusted() - digits + 1)
    return format(d.quantize(q, rounding=ROUND_HALF_EVEN), "f")
