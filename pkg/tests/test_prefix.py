import itertools

import pytest
from hypothesis import given

from conftest import A, K, P, addr_set, all_prefixes, keys, pair_set
from ssroute import (
    Address,
    PairOrder,
    Prefix,
    RouteKey,
    WidthMismatch,
    conflict_zone,
    contains,
    dest_first_cmp,
    pair_conflicts,
    pair_le,
    prefix_disjoint,
    prefix_le,
    source_first_cmp,
)
from ssroute.prefix import InternalContractError, order_min, pair_meet

V6 = 128
R1 = K("2001:db8:1::/48 from ::/0", V6)
R2 = K("::/0 from 2001:db8:2::/48", V6)


# -- contains ---------------------------------------------------------------------

def test_zero_length_prefix_contains_everything():
    p = P("/0")
    assert all(contains(p, Address(4, a)) for a in range(16))
    assert contains(Prefix.default(V6), Address.parse("2001:db8::1", V6))


@pytest.mark.parametrize("addr, expected", [("0111", True), ("1000", False)])
def test_contains_examples(addr, expected):
    assert contains(P("01/2"), A(addr)) is expected
    assert (A(addr).bits in addr_set(P("01/2"))) is expected


def test_contains_width_mismatch():
    with pytest.raises(WidthMismatch):
        contains(P("01/2"), Address(5, 0))


# -- prefix order -----------------------------------------------------------------

def test_prefix_le_examples():
    p = P("01/2")
    assert prefix_le(p, p)
    assert prefix_le(Prefix.parse("2001:db8:1::/48", V6), Prefix.parse("::/0", V6))
    assert not prefix_le(P("01/2"), P("10/2"))
    assert not prefix_le(P("10/2"), P("01/2"))
    with pytest.raises(WidthMismatch):
        prefix_le(P("01/2"), Prefix(5, 0))


def test_prefix_disjoint_examples():
    assert not prefix_disjoint(P("01/2"), P("01/2"))
    assert prefix_disjoint(P("01/2"), P("10/2"))
    assert not addr_set(P("01/2")) & addr_set(P("10/2"))
    assert not prefix_disjoint(Prefix.parse("2001:db8:1::/48", V6), Prefix.parse("::/0", V6))


@pytest.mark.parametrize("width", [1, 3, 5])
def test_prefix_relations_exhaustive(width):
    for p, q in itertools.product(all_prefixes(width), repeat=2):
        sp, sq = addr_set(p), addr_set(q)
        assert prefix_le(p, q) == (sp <= sq)
        assert prefix_disjoint(p, q) == (not sp & sq)
        # exactly one of equal, p < q, q < p, disjoint
        cases = [p == q, prefix_le(p, q) and p != q, prefix_le(q, p) and p != q, prefix_disjoint(p, q)]
        assert sum(cases) == 1
        for a in range(1 << width):
            assert contains(p, Address(width, a)) == (a in sp)


# -- pair order and conflicts -----------------------------------------------------

def test_pair_le_examples():
    assert pair_le(R1, R1)
    assert not pair_le(R1, R2) and not pair_le(R2, R1)
    assert pair_le(K("0/2 from 1/2"), K("0/1 from 1/1"))
    # "0/2 from 10/2" <= "0/1 from 1/1", read with canonical source prefixes
    assert pair_le(K("0/2 from 10/2"), K("0/1 from 1/1"))
    assert pair_set(K("0/2 from 10/2")) <= pair_set(K("0/1 from 1/1"))


def test_pair_conflict_examples():
    assert pair_conflicts(R1, R2)
    assert not pair_conflicts(R1, R1)
    assert not pair_conflicts(K("0/2 from 1/1"), K("0/3 from 10/2"))
    assert pair_le(K("0/3 from 10/2"), K("0/2 from 1/1"))
    assert not pair_conflicts(K("00/2 from 1/1"), K("000/3 from 10/2"))


def test_conflict_zone_examples():
    zone = conflict_zone(R1, R2)
    assert zone == K("2001:db8:1::/48 from 2001:db8:2::/48", V6)
    assert zone.matches(Address.parse("2001:db8:1::1", V6), Address.parse("2001:db8:2::1", V6))
    assert not R2.matches(Address.parse("2001:db8:1::1", V6), Address.parse("2001:db8:3::1", V6))

    r, q = K("0/2 from 1/1"), K("0/1 from 11/2")
    want = pair_set(r) & pair_set(q)
    assert pair_set(conflict_zone(r, q)) == want
    assert conflict_zone(r, q) == K("00/2 from 11/2")
    assert conflict_zone(r, q) == conflict_zone(q, r)


def test_conflict_zone_requires_conflict():
    with pytest.raises(ValueError):
        conflict_zone(R1, R1)


@given(keys(), keys())
def test_conflict_matches_enumeration(r, q):
    sr, sq = pair_set(r), pair_set(q)
    expected = not sr <= sq and not sq <= sr and bool(sr & sq)
    assert pair_conflicts(r, q) == expected
    assert pair_le(r, q) == (sr <= sq)
    if expected:
        assert pair_set(conflict_zone(r, q)) == sr & sq
        assert conflict_zone(r, q) == conflict_zone(q, r)
    meet = pair_meet(r, q)
    assert (set() if meet is None else pair_set(meet)) == sr & sq


# -- total refinements ------------------------------------------------------------

def test_dest_first_examples():
    n, sp = P("01/2"), P("1/1")
    default = P("/0")
    assert dest_first_cmp(RouteKey(n, default), RouteKey(default, sp)) is PairOrder.LESS
    assert dest_first_cmp(R1, R1) is PairOrder.EQUAL
    assert dest_first_cmp(K("0/1 from 1/2"), K("0/1 from 1/1")) is PairOrder.LESS
    assert dest_first_cmp(K("0/1 from 1/1"), K("0/1 from 1/2")) is PairOrder.GREATER


def test_source_first_examples():
    n, sp = P("01/2"), P("1/1")
    default = P("/0")
    assert source_first_cmp(RouteKey(default, sp), RouteKey(n, default)) is PairOrder.LESS
    assert source_first_cmp(R2, R2) is PairOrder.EQUAL
    assert source_first_cmp(K("0/1 from 1/2"), K("1/1 from 1/2")) is PairOrder.INCOMPARABLE


@given(keys(), keys())
def test_refinements_extend_specificity(r, q):
    if pair_le(r, q) and r != q:
        assert dest_first_cmp(r, q) is PairOrder.LESS
        assert source_first_cmp(r, q) is PairOrder.LESS
        assert dest_first_cmp(q, r) is PairOrder.GREATER


def test_refinements_total_on_matching_keys():
    every = [RouteKey(d, s) for d in all_prefixes(3) for s in all_prefixes(3)]
    for a_d, a_s in [(0, 0), (5, 2), (7, 7)]:
        matching = [k for k in every if k.matches(Address(3, a_d), Address(3, a_s))]
        for r, q in itertools.combinations(matching, 2):
            assert dest_first_cmp(r, q) is not PairOrder.INCOMPARABLE
            assert source_first_cmp(r, q) is not PairOrder.INCOMPARABLE


def test_order_min_rejects_incomparable():
    with pytest.raises(InternalContractError):
        order_min([K("0/1"), K("1/1")], dest_first_cmp)
    assert order_min([], dest_first_cmp) is None
    assert order_min([K("/0"), K("01/2"), K("0/1")], dest_first_cmp) == K("01/2")


# -- text forms -------------------------------------------------------------------

@pytest.mark.parametrize("text, width", [
    ("01/2", 4), ("/0", 4), ("0110/3", 4), ("1/1", 1),
    ("::/0", 128), ("2001:db8:1::/48", 128), ("192.168.4.0/24", 32), ("0.0.0.0/0", 32),
])
def test_prefix_round_trip(text, width):
    p = Prefix.parse(text, width)
    assert Prefix.parse(str(p), width) == p
    assert str(Prefix.parse(str(p), width)) == str(p)


@pytest.mark.parametrize("text, width", [
    ("1/0", 4), ("011/1", 4), ("2001:db8:1::/32", 128), ("10.0.0.1/8", 32),
    ("01", 4), ("01/5", 4), ("00000/2", 4), ("2/1", 4),
])
def test_prefix_parse_rejects(text, width):
    with pytest.raises(ValueError):
        Prefix.parse(text, width)


def test_key_text_round_trip():
    text = "::/0 from 2001:db8:2::/48"
    assert str(RouteKey.parse(text, V6)) == text
    assert RouteKey.parse("01/2", 4) == RouteKey(P("01/2"), P("/0"))
    k = K("00/2 from 11/2", 4, 6)
    assert k.src.width == 6 and str(k) == "00/2 from 11/2"


@given(keys(3, 5))
def test_key_round_trip_property(k):
    assert RouteKey.parse(str(k), 3, 5) == k


def test_address_text():
    assert str(Address.parse("2001:db8::1", V6)) == "2001:db8::1"
    assert str(A("0101")) == "0101"
    with pytest.raises(ValueError):
        A("010")


def test_refinements_extend_specificity_exhaustive():
    every = [RouteKey(d, s) for d in all_prefixes(3) for s in all_prefixes(3)]
    for r, q in itertools.permutations(every, 2):
        if pair_le(r, q):
            assert dest_first_cmp(r, q) is PairOrder.LESS
            assert source_first_cmp(r, q) is PairOrder.LESS
