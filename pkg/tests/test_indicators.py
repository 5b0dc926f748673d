import math
import random

import pytest
from hypothesis import assume, given, strategies as st

from unibench.errors import (
    DuplicateSubject,
    EmptyProfileForSubject,
    EmptyRecord,
    MissingReferenceMeasurement,
    NonPositiveMeasurement,
    UnknownReference,
)
from unibench.indicators import (
    Catalog,
    ClampWarning,
    Directionality,
    IndicatorSpec,
    Measurement,
    ProfileSpec,
    RatioTable,
    SubjectRecord,
    build_ratio_table,
    catalog_from_dict,
    catalog_to_dict,
    clamp_value,
    cmi_from_profile_products,
    compose_all,
    compose_cmi,
    compose_profile,
    default_li_catalog,
    format_fixed,
    format_sig,
    normalize_ratio,
    rank,
)

LOWER, HIGHER = Directionality.LOWER_IS_BETTER, Directionality.HIGHER_IS_BETTER
LI = default_li_catalog()
LI_IDS = LI.indicator_ids()


def rec(sid, **values):
    return SubjectRecord.from_measurements(
        sid, [Measurement(k.replace("_", "."), v) for k, v in values.items()]
    )


def flat_catalog(n, directions=None):
    directions = directions or [LOWER] * n
    inds = tuple(IndicatorSpec(f"k{i}", f"k{i}", "u", directions[i], "p") for i in range(n))
    return Catalog(inds, (ProfileSpec("p", "p", tuple(s.id for s in inds)),))


def table_for(ratios, sid="x"):
    return RatioTable("ref", {(sid, f"k{i}"): r for i, r in enumerate(ratios)})


ratio = st.floats(min_value=1e-3, max_value=1e3)
positive = st.floats(min_value=1e-6, max_value=1e6)


# normalize_ratio

@pytest.mark.parametrize(
    "value,ref,d,expected",
    [(4.0, 4.0, LOWER, 1.0), (2.0, 4.0, LOWER, 2.0), (200.0, 100.0, HIGHER, 2.0), (50.0, 100.0, HIGHER, 0.5)],
)
def test_normalize_examples(value, ref, d, expected):
    assert normalize_ratio(value, ref, d) == expected


@pytest.mark.parametrize("value,ref", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_normalize_rejects_degenerate(value, ref):
    with pytest.raises(NonPositiveMeasurement):
        normalize_ratio(value, ref, LOWER)


@given(positive, positive)
def test_directions_are_reciprocal(v, r):
    assert normalize_ratio(v, r, HIGHER) * normalize_ratio(v, r, LOWER) == pytest.approx(1.0, rel=1e-15)


# catalog

def test_default_catalog_shape():
    assert len(LI.indicators) == 10
    assert [p.id for p in LI.profiles] == ["sw", "hw"]
    assert LI.profiles[0].indicator_ids == ("sw.et", "sw.th", "sw.cpi", "sw.cmr")
    assert LI.profiles[1].indicator_ids == ("hw.et", "hw.th", "hw.pd", "hw.lut", "hw.lr", "hw.pc")


@pytest.mark.parametrize(
    "iid,unit,direction",
    [
        ("sw.et", "s", LOWER), ("sw.th", "bps", HIGHER), ("sw.cpi", "cycles/instr", LOWER),
        ("sw.cmr", "dimensionless", LOWER), ("hw.et", "s", LOWER), ("hw.th", "bps", HIGHER),
        ("hw.pd", "ns", LOWER), ("hw.lut", "count", LOWER), ("hw.lr", "count", LOWER), ("hw.pc", "W", LOWER),
    ],
)
def test_default_catalog_entries(iid, unit, direction):
    spec = LI.indicator(iid)
    assert (spec.unit, spec.directionality) == (unit, direction)
    assert spec.profile_id == iid.split(".")[0]


def test_catalog_dict_roundtrip():
    assert catalog_from_dict(catalog_to_dict(LI)) == LI


def test_indicator_spec_validation():
    with pytest.raises(ValueError):
        IndicatorSpec("a", "a", "", LOWER, "p")
    with pytest.raises(ValueError):
        ProfileSpec("p", "p", ())
    with pytest.raises(ValueError):
        ProfileSpec("p", "p", ("a", "a"))


def test_measurement_rejects_non_positive():
    with pytest.raises(NonPositiveMeasurement):
        Measurement("sw.et", 0.0)
    with pytest.raises(ValueError):
        Measurement("sw.et", 1.0, source="guess")


def test_clamp_warns_and_floors():
    with pytest.warns(ClampWarning):
        assert clamp_value(0.0, 1e-9) == 1e-9
    assert clamp_value(0.5, 1e-9) == 0.5
    with pytest.raises(NonPositiveMeasurement):
        clamp_value(0.0)
    with pytest.raises(NonPositiveMeasurement):
        clamp_value(math.nan, 1e-9)


# build_ratio_table

def test_self_normalization():
    t = build_ratio_table([rec("aes128", sw_et=4.0, sw_th=7.0)], "aes128", LI)
    assert t.entries == {("aes128", "sw.et"): 1.0, ("aes128", "sw.th"): 1.0}
    assert t.reference_id == "aes128"


def test_single_ratio():
    t = build_ratio_table([rec("aes128", sw_et=4.0), rec("x", sw_et=2.0)], "aes128", LI)
    assert t.entries[("x", "sw.et")] == 2.0


def test_absent_indicator_gives_no_entry():
    t = build_ratio_table([rec("aes128", sw_et=4.0, sw_th=1.0), rec("x", sw_et=2.0)], "aes128", LI)
    assert ("x", "sw.th") not in t.entries


def test_missing_reference_measurement():
    with pytest.raises(MissingReferenceMeasurement) as e:
        build_ratio_table([rec("aes128", sw_et=4.0), rec("x", hw_pc=0.2)], "aes128", LI)
    assert e.value.indicator_id == "hw.pc"


def test_unknown_reference():
    with pytest.raises(UnknownReference):
        build_ratio_table([rec("x", sw_et=1.0)], "aes128", LI)


def test_duplicate_subject():
    with pytest.raises(DuplicateSubject):
        build_ratio_table([rec("x", sw_et=1.0), rec("x", sw_et=2.0)], "x", LI)


# compose_profile / compose_cmi

def test_profile_product_examples():
    p = ProfileSpec("p", "p", ("k0", "k1", "k2", "k3"))
    assert compose_profile(table_for([2.0, 1.5, 1.0, 1.0]), "x", p) == pytest.approx(3.0, rel=1e-15)
    assert compose_profile(table_for([1.0] * 4), "x", p) == 1.0


def test_profile_product_matches_sequential_multiplication():
    rng = random.Random(1)
    p = ProfileSpec("p", "p", tuple(f"k{i}" for i in range(10)))
    for _ in range(200):
        ratios = [10 ** rng.uniform(-1, 1) for _ in range(10)]
        naive = 1.0
        for r in ratios:
            naive *= r
        assert compose_profile(table_for(ratios), "x", p) == pytest.approx(naive, rel=1e-12)


def test_empty_profile():
    with pytest.raises(EmptyProfileForSubject):
        compose_profile(table_for([2.0]), "x", ProfileSpec("q", "q", ("zz",)))


@pytest.mark.parametrize("ratios,expected", [([1.0] * 10, 1.0), ([1.0, 4.0], 2.0), ([2.0] * 4, 2.0)])
def test_cmi_examples(ratios, expected):
    cat = flat_catalog(len(ratios))
    res = compose_cmi(table_for(ratios), "x", cat.profiles)
    assert res.cmi == pytest.approx(expected, rel=1e-15)
    assert res.ratio_count == len(ratios)
    assert res.included_indicators == tuple(f"k{i}" for i in range(len(ratios)))


def test_cmi_against_direct_root():
    rng = random.Random(2)
    cat = flat_catalog(10)
    for _ in range(200):
        ratios = [10 ** rng.uniform(-1, 1) for _ in range(10)]
        prod = 1.0
        for r in ratios:
            prod *= r
        assert compose_cmi(table_for(ratios), "x", cat.profiles).cmi == pytest.approx(prod ** 0.1, rel=1e-9)


def test_partial_record_warns_and_shrinks_root():
    res = compose_cmi(table_for([4.0]), "x", flat_catalog(3).profiles)
    assert res.ratio_count == 1 and res.cmi == 4.0
    assert res.warnings and "k1" in res.warnings[0]


def test_empty_record():
    with pytest.raises(EmptyRecord):
        compose_cmi(RatioTable("ref"), "x", LI.profiles)


def test_full_li_self_reference_is_exactly_one():
    r = rec("aes128", **{i.replace(".", "_"): 3.7 for i in LI_IDS})
    _, results, ranking = compose_all([r], "aes128", LI)
    assert results[0].cmi == 1.0
    assert results[0].ratio_count == 10
    assert ranking == [(1, "aes128", 1.0)]


# properties

@given(st.lists(ratio, min_size=1, max_size=20), st.data())
def test_root_scaling(ratios, data):
    cat = flat_catalog(len(ratios))
    base = compose_cmi(table_for(ratios), "x", cat.profiles).cmi
    i = data.draw(st.integers(0, len(ratios) - 1))
    c = data.draw(st.floats(min_value=1e-3, max_value=1e3))
    scaled = list(ratios)
    scaled[i] *= c
    got = compose_cmi(table_for(scaled), "x", cat.profiles).cmi
    assert got == pytest.approx(base * c ** (1 / len(ratios)), rel=1e-9)


@given(st.lists(ratio, min_size=1, max_size=20))
def test_geometric_mean_bounds(ratios):
    cmi = compose_cmi(table_for(ratios), "x", flat_catalog(len(ratios)).profiles).cmi
    tol = 1e-12 * max(ratios)
    assert min(ratios) - tol <= cmi <= max(ratios) + tol


@given(st.lists(ratio, min_size=1, max_size=20), st.randoms(use_true_random=False))
def test_permutation_invariance(ratios, rnd):
    cat = flat_catalog(len(ratios))
    a = compose_cmi(table_for(ratios), "x", cat.profiles).cmi
    shuffled = list(ratios)
    rnd.shuffle(shuffled)
    assert compose_cmi(table_for(shuffled), "x", cat.profiles).cmi == pytest.approx(a, rel=1e-12)


@given(st.lists(ratio, min_size=2, max_size=20), st.data())
def test_two_stage_route_matches_flat_route(ratios, data):
    split = data.draw(st.integers(1, len(ratios) - 1))
    ids = [f"k{i}" for i in range(len(ratios))]
    profiles = (ProfileSpec("a", "a", tuple(ids[:split])), ProfileSpec("b", "b", tuple(ids[split:])))
    res = compose_cmi(table_for(ratios), "x", profiles)
    assert cmi_from_profile_products(res) == pytest.approx(res.cmi, rel=1e-12)
    assert math.prod(res.profile_products.values()) == pytest.approx(math.prod(ratios), rel=1e-12)


@given(st.dictionaries(st.sampled_from(LI_IDS), positive, min_size=1), positive)
def test_self_reference_identity(values, scale):
    r = SubjectRecord.from_measurements("ref", [Measurement(k, v * scale) for k, v in values.items()])
    res = compose_cmi(build_ratio_table([r], "ref", LI), "ref", LI.profiles)
    assert res.cmi == 1.0


@given(
    st.lists(st.tuples(*[positive] * 3), min_size=2, max_size=6),
    st.integers(0, 2),
    st.floats(min_value=0.5, max_value=0.99),
    st.booleans(),
)
def test_direction_monotonicity(rows, which, factor, higher):
    dirs = [LOWER, HIGHER, LOWER]
    dirs[which] = HIGHER if higher else LOWER
    cat = flat_catalog(3, dirs)
    subjects = [SubjectRecord.from_measurements(f"s{i}", [Measurement(f"k{j}", v) for j, v in enumerate(row)])
                for i, row in enumerate(rows)]
    target = subjects[-1]
    before = compose_all(subjects, "s0", cat)[1][-1].cmi
    old = target.measurements[f"k{which}"].value
    new = old / factor if higher else old * factor
    target.measurements[f"k{which}"] = Measurement(f"k{which}", new)
    after = compose_all(subjects, "s0", cat)[1][-1].cmi
    assert after > before


@given(st.lists(st.tuples(*[positive] * 3), min_size=2, max_size=6, unique=True), st.integers(0, 2),
       st.floats(min_value=1e-3, max_value=1e3))
def test_reference_rescaling_invariance(rows, which, s):
    cat = flat_catalog(3, [LOWER, HIGHER, LOWER])

    def build(k):
        return [SubjectRecord.from_measurements(
            f"s{i}", [Measurement(f"k{j}", v * (k if j == which else 1.0)) for j, v in enumerate(row)])
            for i, row in enumerate(rows)]

    t1, r1, k1 = compose_all(build(1.0), "s0", cat)
    t2, r2, k2 = compose_all(build(s), "s0", cat)
    assert t1.entries.keys() == t2.entries.keys()
    for key in t1.entries:
        assert t2.entries[key] == pytest.approx(t1.entries[key], rel=1e-12)
    for a, b in zip(r1, r2):
        assert b.cmi == pytest.approx(a.cmi, rel=1e-12)
    cmis = sorted(r.cmi for r in r1)
    assume(all(b - a > 1e-9 * b for a, b in zip(cmis, cmis[1:])))
    assert [r.subject_id for r in k1] == [r.subject_id for r in k2]


# rank

def test_rank_published_scores():
    rows = rank([("hight", 2.49), ("katan64", 0.79), ("threeway", 3.38)])
    assert rows == [(1, "threeway", 3.38), (2, "hight", 2.49), (3, "katan64", 0.79)]


def test_rank_ties_share_rank():
    assert rank([("B", 1.0), ("A", 1.0)]) == [(1, "A", 1.0), (1, "B", 1.0)]
    assert [r.rank for r in rank([("a", 2.0), ("b", 2.0), ("c", 1.0)])] == [1, 1, 3]


def test_rank_singleton_and_errors():
    assert rank([("x", 0.5)]) == [(1, "x", 0.5)]
    with pytest.raises(DuplicateSubject):
        rank([("x", 1.0), ("x", 2.0)])
    with pytest.raises(ValueError):
        rank([])


@given(st.dictionaries(st.text("abc", min_size=1, max_size=3), st.sampled_from([0.5, 1.0, 2.0, 3.0]), min_size=1))
def test_rank_is_competition_ranking(scores):
    rows = rank(scores.items())
    for pos, row in enumerate(rows):
        assert row.rank == 1 + sum(1 for v in scores.values() if v > row.cmi)
        if pos:
            prev = rows[pos - 1]
            assert (-prev.cmi, prev.subject_id) < (-row.cmi, row.subject_id)


# formatting

@pytest.mark.parametrize("x,out", [(3.38, "3.38"), (2.675, "2.68"), (2.665, "2.66"), (0.125, "0.12"), (1.0, "1.00")])
def test_format_fixed_half_even(x, out):
    assert format_fixed(x) == out


@pytest.mark.parametrize("x,out", [(1.0, "1.000"), (0.09671234, "0.09671"), (12345.6, "12350"), (2.00005, "2.000")])
def test_format_sig(x, out):
    assert format_sig(x) == out
