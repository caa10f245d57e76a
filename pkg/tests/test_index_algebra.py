import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrayphg import index_algebra as ia
from xrayphg.errors import IntegrabilityError

GOLDEN = Path(__file__).parent / "golden"
CUTOFF = 5.0


def pts(e, s):
    return [(p.z, p.k) for p in e.enumerate_below(s)]


def golden_rows(name):
    with open(GOLDEN / name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [(Fraction(r["re_z"]), int(r["k"])) for r in rows]


def generated_sets():
    yield "xray_refined_N0.csv", ia.xray_index(ia.natural(), refined=True)
    yield "xray_naive_N0.csv", ia.xray_index(ia.natural(), refined=False)
    for k in range(4):
        ek = ia.normal_iterate_index(k)
        yield f"xray_refined_E{k}.csv", ia.xray_index(ek, refined=True)
        yield f"xray_naive_E{k}.csv", ia.xray_index(ek, refined=False)
        yield f"normal_iterate_E{k}.csv", ek
    gammas = {"0": Fraction(0), "1_2": Fraction(1, 2), "1": Fraction(1), "2": Fraction(2), "3_2": Fraction(3, 2)}
    for tag, g in gammas.items():
        for k in range(3):
            yield f"backprojection_g{tag}_k{k}.csv", ia.backprojection_index(g, k)


@pytest.mark.parametrize("name, eset", list(generated_sets()), ids=lambda v: v if isinstance(v, str) else "")
def test_golden_enumerations(name, eset):
    assert pts(eset, CUTOFF) == golden_rows(name)


def test_enumerate_below_examples():
    assert pts(ia.natural(), 2.5) == [(0, 0), (1, 0), (2, 0)]
    half = ia.progression(Fraction(1, 2), 0, 2)
    assert pts(half, 3) == [(Fraction(1, 2), 0), (Fraction(5, 2), 0)]
    assert pts(ia.progression(0, 1, 1), 0) == [(0, 0), (0, 1)]


def test_extended_union_examples():
    n0 = ia.natural()
    both = ia.extended_union(n0, n0)
    assert both.equal_below(ia.natural(1), 6)
    halves = ia.progression(Fraction(1, 2))
    assert ia.extended_union(n0, halves).equal_below(ia.union(n0, halves), 6)


def test_scale_examples():
    assert pts(ia.scale(ia.natural(), 2), 2) == [(Fraction(n, 2), 0) for n in range(5)]
    e = ia.progression(3, 1)
    assert ia.scale(e, 1).equal_below(e, 8)


def test_pullback_examples():
    n0 = ia.natural()
    assert ia.pullback_index(n0, 1).equal_below(n0, 8)
    g = Fraction(1, 3)
    single = ia.progression(g)
    assert pts(ia.pullback_index(single, 2), 3) == [(2 * g + ell, 0) for ell in range(3)]
    assert pts(ia.pullback_index(single, 2, strict=True), 3) == [(2 * g, 0), (2 * g + 2, 0)]
    assert ia.pullback_index(single, 0).equal_below(n0, 5)


def test_xray_index_examples():
    n0 = ia.natural()
    assert pts(ia.xray_index(n0), 7) == [(n, 0) for n in (1, 3, 5, 7)]
    assert pts(ia.xray_index(n0, refined=False), 4) == [(n, 0) for n in range(1, 5)]
    g = Fraction(1, 4)
    out = ia.xray_index(ia.progression(g))
    assert pts(out, 6) == [(2 * g + 1 + 2 * p, 0) for p in range(3)]


def test_xray_index_integrability():
    with pytest.raises(IntegrabilityError):
        ia.xray_index(ia.progression(-1))
    with pytest.raises(IntegrabilityError):
        ia.xray_index(ia.progression(Fraction(-3, 2)), refined=False)


def test_xray_pushforward_examples():
    fam = ia.xray_family(ia.natural())
    pushed = ia.pushforward_index(fam, ia.F_HAT, ia.GLANCING)
    assert pts(pushed, 5) == [(n, 0) for n in range(1, 6)]


def test_backprojection_examples():
    n0 = ia.natural()
    assert ia.backprojection_index(0, 0).equal_below(n0, 6)
    e = ia.backprojection_index(1, 0)
    assert ia.is_subset_below(ia.progression(1, 1), e, 6)
    assert not e.contains(0, 1)
    e = ia.backprojection_index(Fraction(1, 2), 0)
    assert e.contains(Fraction(3, 4)) and not e.contains(Fraction(3, 4), 1)
    e = ia.backprojection_index(0, 1)
    assert e.contains(Fraction(1, 2)) and not e.contains(Fraction(1, 2), 1)
    assert not e.contains(1, 1)


def test_backprojection_gamma_tolerance():
    assert ia.classify_gamma(1 + 1e-11) == "odd"
    assert ia.classify_gamma(2.0) == "even"
    assert ia.classify_gamma(0.5) == "generic"
    assert ia.classify_gamma(-1) == "generic"


def test_backprojection_naive_examples():
    n0 = ia.natural()
    naive = ia.backprojection_index_naive(n0)
    assert naive.contains(Fraction(1, 2)) and naive.contains(1, 1)
    odd = ia.xray_index(n0)
    naive_odd = ia.backprojection_index_naive(odd)
    assert all(naive_odd.contains(n, 1) for n in range(1, 5))
    assert not naive_odd.contains(0, 1)
    assert ia.backprojection_index_naive(ia.empty()).equal_below(n0, 6)


def test_backprojection_pushforward_matches_naive():
    n0 = ia.natural()
    push = ia.backprojection_index_pushforward(n0)
    assert push.contains(Fraction(1, 2)) and push.contains(1, 1)
    assert ia.is_subset_below(ia.backprojection_index_naive(n0), push, 4)


def test_sharp_backprojection_inside_naive():
    for k_set in (ia.natural(), ia.xray_index(ia.natural()), ia.progression(Fraction(1, 2), 1)):
        sharp = ia.backprojection_index_set(k_set)
        naive = ia.backprojection_index_naive(k_set)
        assert ia.is_subset_below(sharp, naive, 5)


def test_normal_iterate_examples():
    assert ia.normal_iterate_index(0).equal_below(ia.natural(), 8)
    assert pts(ia.normal_iterate_index(1), 2) == [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1)]


@pytest.mark.parametrize("k", range(4))
def test_normal_iterate_composition(k):
    composed = ia.normal_index(ia.normal_iterate_index(k))
    assert composed.equal_below(ia.normal_iterate_index(k + 1), 5)


def test_weighted_cycle():
    once = ia.weighted_normal_index(ia.natural(1))
    assert once.contains(Fraction(1, 2))
    assert all(p.k == 0 for p in once.enumerate_below(3))
    twice = ia.weighted_normal_index(once)
    assert any(p.k >= 1 for p in twice.enumerate_below(3))


def test_json_round_trip():
    e = ia.backprojection_index(Fraction(1, 2), 1)
    text = e.to_json()
    data = json.loads(text)
    assert set(data) == {"generators", "label"}
    back = ia.from_json(text)
    assert back.equal_below(e, 10)


def test_enumeration_rows_shape():
    rows = ia.enumeration_rows(ia.normal_iterate_index(1), 1)
    assert rows == [(0.0, 0.0, 0), (1.0, 0.0, 0), (1.0, 0.0, 1)]


def test_complex_exponents_sort():
    e = ia.union(ia.progression(complex(0.5, 1.0)), ia.progression(complex(0.5, -1.0)))
    rows = ia.enumeration_rows(e, 0.5)
    assert rows == [(0.5, -1.0, 0), (0.5, 1.0, 0)]


# ---------------------------------------------------------------------------
# property tests

bases = st.integers(-1, 8).map(lambda n: Fraction(n, 2))
gens = st.builds(
    lambda z, step, k: ia.Generator(z, step, (k,)),
    bases,
    st.sampled_from([1, 2]),
    st.integers(0, 2),
)
index_sets = st.lists(gens, min_size=1, max_size=3).map(ia.from_generators)
cinf_sets = st.lists(
    st.builds(lambda z, k: ia.Generator(z, 1, (k,)), bases, st.integers(0, 2)), min_size=1, max_size=3
).map(ia.from_generators)


@settings(max_examples=60, deadline=None)
@given(index_sets, index_sets)
def test_closure_conditions(e1, e2):
    for e in (e1, ia.union(e1, e2), ia.extended_union(e1, e2), ia.scale(e1, 2), ia.pullback_index(e1, 2)):
        cond = ia.check_conditions(e, 10)
        assert cond["a"] and cond["b"]


@settings(max_examples=60, deadline=None)
@given(cinf_sets)
def test_refined_xray_closed_under_two(e):
    out = ia.xray_index(e)
    assert all(ia.check_conditions(out, 10, step=2).values())


@settings(max_examples=60, deadline=None)
@given(index_sets, index_sets)
def test_extended_union_monotone(e1, e2):
    ext = ia.extended_union(e1, e2)
    assert ia.is_subset_below(e1, ext, 6)
    assert ia.is_subset_below(e2, ext, 6)


@settings(max_examples=60, deadline=None)
@given(cinf_sets, st.floats(0, 8))
def test_refined_inside_naive(e, s):
    assert ia.is_subset_below(ia.xray_index(e), ia.xray_index(e, refined=False), s)


@settings(max_examples=40, deadline=None)
@given(index_sets, st.floats(-2, 8))
def test_enumeration_sorted_and_bounded(e, s):
    got = e.enumerate_below(s)
    assert got == sorted(got, key=ia.IndexPoint.sort_key)
    assert all(ia.re(p.z) <= s + 1e-12 for p in got)


@settings(max_examples=40, deadline=None)
@given(index_sets)
def test_json_round_trip_property(e):
    assert ia.from_json(e.to_json()).equal_below(e, 10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 4))
def test_sequence_property(k):
    assert ia.is_subset_below(ia.normal_iterate_index(k), ia.normal_iterate_index(k + 1), 8)
    assert ia.is_subset_below(ia.normal_index(ia.normal_iterate_index(k)), ia.normal_iterate_index(k + 1), 6)
