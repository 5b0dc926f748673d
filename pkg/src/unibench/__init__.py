"""Unified hardware/software performance analysis.

Measurements are normalised against a reference subject, multiplied per
profile and combined into a geometric-mean indicator used for ranking.
"""

__version__ = "0.1.0"

from .indicators import (
    Catalog,
    CompositeResult,
    Directionality,
    IndicatorSpec,
    Measurement,
    ProfileSpec,
    RankRow,
    RatioTable,
    SubjectRecord,
    build_ratio_table,
    compose_all,
    compose_cmi,
    compose_profile,
    default_li_catalog,
    normalize_ratio,
    rank,
)

__all__ = [
    "# noqa: E402",
    "Catalog",
    "CompositeResult",
    "Directionality",
    "IndicatorSpec",
    "Measurement",
    "ProfileSpec",
    "RankRow",
    "RatioTable",
    "SubjectRecord",
    "build_ratio_table",
    "compose_all",
    "compose_cmi",
    "compose_profile",
    "default_li_catalog",
    "normalize_ratio",
    "rank",
]
