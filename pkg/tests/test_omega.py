from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from aitlab.enumeration import HaltingDatabase, Status, count_valid, dovetail
from aitlab.omega import (
    Dyadic, bounds, certified_bits_count_vs_information, certified_prefix, diverged_mass,
    information_csv, lower_bound, normality_stats, total_mass, undecided_mass, unexplored_tail,
)


def test_dyadic_canonical():
    assert Dyadic(4, 5) == Dyadic(1, 3)
    assert (Dyadic(0, 9).numerator, Dyadic(0, 9).scale) == (0, 0)
    assert str(Dyadic(113, 9)) == "113/512"
    assert Dyadic(1, 3) + Dyadic(1, 6) == Dyadic(9, 6)
    assert Dyadic.ceil(Fraction(1, 3), 4) == Dyadic(6, 4)
    assert Dyadic(1, 3).binary(5) == "0.00100"
    with pytest.raises(ValueError):
        Dyadic.from_fraction(Fraction(1, 3))


@given(st.integers(0, 10 ** 6), st.integers(0, 40), st.integers(0, 10 ** 6), st.integers(0, 40))
def test_dyadic_matches_fractions(a, k, b, j):
    x, y = Dyadic(a, k), Dyadic(b, j)
    assert (x + y).to_fraction() == Fraction(a, 2 ** k) + Fraction(b, 2 ** j)
    assert (x < y) == (Fraction(a, 2 ** k) < Fraction(b, 2 ** j))
    assert x.numerator % 2 == 1 or x.scale == 0


def test_lower_bound_examples(db3):
    assert lower_bound(dovetail(1, 10)) == Dyadic(1, 3)
    assert lower_bound(dovetail(2, 10)) == Dyadic(3, 4)
    assert lower_bound(db3) == Dyadic(113, 9)


def test_undecided_mass_examples(db3, db4):
    assert undecided_mass(db3) == Dyadic(0, 0)
    assert undecided_mass(db4) == Dyadic(0, 0)
    nocycle = dovetail(4, 10, detect_cycles=False)
    und = [r for r in nocycle if r.status is Status.UNDECIDED]
    assert "010100101110" in {r.program_bits for r in und}
    assert undecided_mass(nocycle).to_fraction() >= Fraction(1, 2 ** 12)
    assert undecided_mass(nocycle).to_fraction() == sum(Fraction(1, 2 ** r.bit_length) for r in und)


def test_unexplored_tail_properties():
    for L in range(1, 21):
        assert unexplored_tail(L + 1) < unexplored_tail(L)
    for L in range(1, 13):
        assert unexplored_tail(L).to_fraction() >= Fraction(count_valid(L + 1), 8 ** (L + 1))
        assert unexplored_tail(L).scale <= 4 * L
    assert unexplored_tail(12).to_fraction() <= Fraction(1, 2) * Fraction(3, 4) ** 12


def test_tail_dominates_true_remaining_mass():
    # remaining mass over the next 30 lengths, computed directly
    for L in (1, 3, 6):
        direct = sum(Fraction(count_valid(n), 8 ** n) for n in range(L + 1, L + 31))
        assert unexplored_tail(L).to_fraction() > direct


def test_bounds_L1():
    b = bounds(dovetail(1, 10))
    assert b.lower == Dyadic(1, 3)
    assert b.tail_bound == unexplored_tail(1) == Dyadic(3, 4)
    assert b.upper == Dyadic(5, 4)
    # [1/8, 5/16] sits inside [0, 1/2) but straddles 1/4
    assert b.certified_bits == "0"


def test_bounds_invariants(db_factory):
    prev = None
    for L in range(1, 8):
        db = db_factory(L, 2000)
        b = bounds(db)
        assert Dyadic(0, 0) <= b.lower <= b.upper <= Dyadic(1, 0)
        assert b.upper == b.lower + b.undecided_mass + b.tail_bound
        assert b.lower + b.undecided_mass + diverged_mass(db) == total_mass(L)
        lo, hi = b.lower.to_fraction(), b.upper.to_fraction()
        k = len(b.certified_bits)
        a = Fraction(int(b.certified_bits or "0", 2), 2 ** k)
        assert a <= lo and hi < a + Fraction(1, 2 ** k)
        if prev is not None:
            assert prev.contains(b)
            assert b.certified_bits.startswith(prev.certified_bits)
        prev = b


def test_certified_prefix_edge_cases():
    assert certified_prefix(Dyadic(1, 3), Dyadic(1, 3), cap=8) == "00100000"
    assert certified_prefix(Dyadic(1, 1), Dyadic(3, 2)) == "1"
    assert certified_prefix(Dyadic(0, 0), Dyadic(1, 0)) == ""
    # upper touching a dyadic boundary is not inside
    assert certified_prefix(Dyadic(1, 3), Dyadic(1, 2)) == "0"


def test_information_table(db_factory):
    rows = certified_bits_count_vs_information([db_factory(L, 1000) for L in (1, 2, 3)])
    assert [r.certified for r in rows] == sorted(r.certified for r in rows)
    assert bounds(HaltingDatabase(0, 0)).certified_bits == ""
    assert information_csv(rows).splitlines()[0] == "L,T,decided,certified_bits"


def test_removing_records_never_helps(db_factory):
    db = db_factory(7, 1000)
    full = len(bounds(db).certified_bits)
    thinned = HaltingDatabase(db.max_symbols, db.max_steps,
                              {k: v for i, (k, v) in enumerate(db.records.items()) if i % 5})
    assert len(bounds(thinned).certified_bits) <= full
    assert bounds(db).lower >= bounds(thinned).lower


def test_normality_stats():
    assert normality_stats("0011") == (2, 2, 2)
    assert normality_stats("") == (0, 0, 0)
    assert normality_stats("0111010") == (3, 4, 3)


def test_report_fields(db3):
    text = bounds(db3).report()
    assert "lower=113/512" in text
    assert "machine=bitf-v1" in text
    assert "lower_binary=0.00111000100000000000000000000000" in text
