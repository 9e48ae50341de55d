import pytest

from aitlab.lisp import evaluate, parse, print_canonical, size
from aitlab.metamath import (
    GLUE_K, BoundRespected, CapExceeded, CompressionWitness, Label, MalformedClaim, Outcome,
    TheoryEvalError, TheoryFixture, berry_refute, bounded_elegance_oracle, compressor_for,
    elegance_growth, enumerate_claims, expressions_of_size, hauptsatz_check, refuter_size, threshold,
)

from conftest import THEORIES

SOUND = TheoryFixture.load(THEORIES / "sound_oracle.lisp")
UNSOUND = TheoryFixture.load(THEORIES / "unsound_pad.lisp")
EMPTY = TheoryFixture.load(THEORIES / "empty.lisp")


@pytest.fixture(scope="module")
def oracle_rows():
    return bounded_elegance_oracle(12)


def test_fixture_labels_and_sizes():
    assert SOUND.label is Label.SOUND and EMPTY.label is Label.SOUND
    assert UNSOUND.label is Label.PLANTED_UNSOUND
    assert SOUND.theory_size == size(SOUND.expr) == 371
    assert threshold(UNSOUND) == UNSOUND.theory_size + refuter_size() + GLUE_K


def test_refuter_constants_golden():
    assert refuter_size() == 451
    assert GLUE_K == 11
    for th in (SOUND, UNSOUND, EMPTY):
        assert size(compressor_for(th)) == threshold(th)


@pytest.mark.parametrize("th", [SOUND, UNSOUND, EMPTY], ids=lambda t: t.name)
def test_claims_are_prefix_monotone(th):
    assert enumerate_claims(th, 500)[:len(enumerate_claims(th, 50))] == enumerate_claims(th, 50)
    prev = []
    for t in range(1, 700, 7):
        cur = enumerate_claims(th, t)
        assert cur[:len(prev)] == prev
        prev = cur


def test_atom_result_is_malformed():
    th = TheoryFixture.from_source("(define theory (lambda (t) (quote x)))")
    with pytest.raises(MalformedClaim) as e:
        enumerate_claims(th, 100)
    assert e.value.index == -1


def test_bad_entry_reports_its_index():
    th = TheoryFixture.from_source(
        "(define theory (lambda (t) (quote ((elegant (quote 0)) (proved 1)))))")
    with pytest.raises(MalformedClaim) as e:
        enumerate_claims(th, 100)
    assert e.value.index == 1


@pytest.mark.parametrize("src", [
    "(define theory 1)", "(define other (lambda (t) t))", "(define theory (lambda (t) t)) (a)",
])
def test_fixture_shape_is_checked(src):
    with pytest.raises(TheoryEvalError):
        TheoryFixture.from_source(src)


def test_erroring_theory():
    th = TheoryFixture.from_source("(define theory (lambda (t) (car t)))")
    with pytest.raises(TheoryEvalError):
        enumerate_claims(th, 100)


def test_sound_fixture_respects_bound():
    r = berry_refute(SOUND, 100_000)
    assert isinstance(r, BoundRespected)
    assert r.threshold == threshold(SOUND) and r.claims_examined == 7
    assert all(size(e) <= r.threshold for e in enumerate_claims(SOUND, 100_000))


def test_empty_theory_respects_bound():
    r = berry_refute(EMPTY, 10_000)
    assert isinstance(r, BoundRespected) and r.claims_examined == 0


def test_unsound_fixture_is_refuted():
    w = berry_refute(UNSOUND, 100_000)
    assert isinstance(w, CompressionWitness)
    assert w.size_compressor == threshold(UNSOUND) < w.size_claimed
    assert w.value == ("a",)
    assert w.verify()
    # independent re-check from printed text
    wv = evaluate(parse(print_canonical(w.compressor)), 100_000)
    ev = evaluate(parse(print_canonical(w.claimed)), 100_000)
    assert wv.ok and ev.ok and wv.value == ev.value


def test_tampered_witness_fails_verification():
    w = berry_refute(UNSOUND, 100_000)
    bad = CompressionWitness(parse("(quote (b))"), w.compressor, w.value, w.compressor_budget, 100)
    assert not bad.verify()


def test_hauptsatz_reports():
    rep = hauptsatz_check(SOUND, 100_000)
    assert rep.outcome is Outcome.BOUND_RESPECTED
    assert rep.threshold == rep.theory_size + rep.refuter_size + rep.glue
    assert f"threshold={rep.threshold}" in rep.text()
    rep = hauptsatz_check(UNSOUND, 100_000)
    assert rep.outcome is Outcome.REFUTED
    text = rep.text()
    assert "outcome=REFUTED" in text and f"witness_claimed_size={rep.witness.size_claimed}" in text
    assert hauptsatz_check(UNSOUND, 100_000).text() == text


def test_expressions_of_size_counts():
    assert sorted(map(print_canonical, expressions_of_size(1))) == sorted(
        ["+", "<", "a", "t", "0", "1"])
    assert [print_canonical(e) for e in expressions_of_size(2)] == ["eq", "if", "()"]
    for s in range(1, 8):
        assert all(size(e) == s for e in expressions_of_size(s))


def test_oracle_examples(oracle_rows):
    by_text = {print_canonical(r.expression): r for r in oracle_rows}
    assert by_text["0"].elegant and by_text["0"].certified and by_text["0"].size == 1
    assert by_text["1"].elegant
    assert by_text["(+ 0 1)"].value == 1 and not by_text["(+ 0 1)"].elegant
    minimal = min(r.size for r in oracle_rows if r.value == ("a",))
    assert minimal == 11
    assert by_text["(quote (a))"].elegant


def test_oracle_cap():
    with pytest.raises(CapExceeded):
        bounded_elegance_oracle(13)


def test_sound_claims_are_oracle_certified(oracle_rows):
    certified = {print_canonical(r.expression) for r in oracle_rows if r.certified}
    for e in enumerate_claims(SOUND, 100_000):
        assert print_canonical(e) in certified


def test_elegance_facts_grow(oracle_rows):
    growth = elegance_growth(oracle_rows, 12)
    counts = [n for _, n in growth]
    assert counts == sorted(counts) and counts[-1] > counts[0]
    assert growth[-1] == (12, 46)
