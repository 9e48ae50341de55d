import pytest

from aitlab.bitf import BitfProgram, decode_bits, encode_bits, run, Verdict
from aitlab.complexity import (
    EleganceRecord, InsufficientCoverage, NotCovered, best_theory, build_table, elegant,
    irreducibility_constant, oracle_complexity,
)
from aitlab.enumeration import HaltingDatabase, Status, dovetail


def test_table_fixed_values(db3, db4):
    t3 = build_table(db3)
    assert (t3[""].c_bits, t3[""].witnesses, t3[""].exact) == (3, ("110",), True)
    assert (t3["0"].c_bits, t3["0"].witnesses, t3["0"].exact) == (6, ("011110",), True)
    assert (t3["1"].c_bits, t3["1"].exact) == (9, True)
    assert [decode_bits(w).text for w in t3["1"].witnesses] == ["+.!"]
    t4 = build_table(db4)
    assert t4["01"].c_bits == 12
    assert [decode_bits(w).text for w in t4["01"].witnesses] == [".+.!"]


def test_oracle_examples(db5):
    assert oracle_complexity("0", 3, 100) == 6
    assert oracle_complexity("", 1, 10) == 3
    assert oracle_complexity("11", 5, 1000) == build_table(db5)["11"].c_bits
    assert oracle_complexity("0101010101", 4, 100) is None


def test_oracle_equivalence_L5(db5):
    table = build_table(db5)
    for entry in table.rows():
        assert oracle_complexity(entry.output, 5, 10_000) == entry.c_bits, entry.output


def test_elegance(db3, db5):
    progs = {r.program.text for r in elegant(db3)}
    assert "!" in progs and ".!" in progs and ">.!" not in progs
    table = build_table(db5)
    assert len(table["1"].witnesses) == 1 and decode_bits(table["1"].witnesses[0]).text == "+.!"
    for rec in elegant(db5):
        assert rec.certified
        assert encode_bits(rec.program) in table[rec.output].witnesses


def test_witness_validity_and_anti_compression(db5):
    table = build_table(db5)
    for entry in table.rows():
        for bits in entry.witnesses:
            rec = db5[bits]
            o = run(decode_bits(bits), rec.steps)
            assert (o.verdict, o.output) == (Verdict.HALTED, entry.output)
    for rec in db5:
        if rec.status is Status.HALTED:
            assert rec.bit_length >= table[rec.output].c_bits


def test_best_theory(db3, db4):
    t3 = build_table(db3)
    assert best_theory("0", t3).program.text == ".!"
    assert best_theory("", t3).program.text == "!"
    assert best_theory("0101010101", build_table(db4)) == NotCovered("0101010101")
    assert max(len(o) for o in build_table(db4).entries) == 3


def test_exactness_tracks_undecided():
    db = dovetail(5, 10, detect_cycles=False)  # +[]! and friends time out
    table = build_table(db)
    assert table.first_undecided == 4
    for e in table.rows():
        assert e.exact == (e.c_bits <= 12)


def test_monotone_coverage(db_factory):
    small = build_table(db_factory(4, 1000))
    big = build_table(db_factory(6, 10_000))
    for out, e in small.entries.items():
        assert big[out].c_bits <= e.c_bits
        if e.exact:
            assert big[out].exact
    loose = build_table(dovetail(5, 10, detect_cycles=False))
    tight = build_table(dovetail(5, 10_000))
    for out, e in loose.entries.items():
        assert tight[out].c_bits <= e.c_bits
        assert tight[out].exact or not e.exact


def test_irreducibility_insufficient(db3, db5):
    with pytest.raises(InsufficientCoverage):
        irreducibility_constant(build_table(db3))
    with pytest.raises(InsufficientCoverage):
        irreducibility_constant(build_table(db5))


def test_irreducibility_at_L6(db_factory):
    rep = irreducibility_constant(build_table(db_factory(6, 10_000)))
    assert rep.c_emp >= 0
    bang = next(r for r in rep.rows if r.program.text == "!")
    assert bang.encoding == "110"
    assert bang.encoding_complexity == oracle_complexity("110", 6, 10_000) == 18
    assert bang.slack == 3 - 18
    assert rep.max_slack == max(r.slack for r in rep.rows)


def test_csv_export(db3):
    lines = build_table(db3).to_csv().splitlines()
    assert lines[0] == "output,c_bits,exact,witness_bits,witness_count"
    assert lines[1] == ",3,true,110,1"
    assert lines[2] == "0,6,true,011110,1"
    outs = [l.split(",")[0] for l in lines[1:]]
    assert outs == sorted(outs, key=lambda o: (len(o), o))
