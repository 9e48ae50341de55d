"""Theories as claim enumerators, the Berry refuter, and a bounded elegance oracle.

Every size here is :func:`aitlab.lisp.size`, i.e. characters of canonical
TinyLISP text, so theories, the refuter and claimed programs are all measured
in the same language.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence

from .lisp import SExpr, evaluate, parse_all, print_canonical, size

GLUE_K = 11  # "(" R " (quote " THEORY "))"
ORACLE_CAP = 12
ORACLE_VOCABULARY = ("quote", "atom", "eq", "car", "cdr", "cons", "if", "+", "<", "size",
                     "a", "t", "nil", "0", "1")


class MetamathError(Exception):
    pass


class TheoryEvalError(MetamathError):
    pass


class MalformedClaim(MetamathError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"claim {index}: {reason}")
        self.index = index


class RefuterEvalError(MetamathError):
    pass


class NonTerminatingSubject(MetamathError):
    def __init__(self, subject: SExpr, budget: int):
        super().__init__(f"claimed subject of size {size(subject)} did not return within {budget}")
        self.subject = subject


class CapExceeded(MetamathError):
    pass


class Label(str, enum.Enum):
    SOUND = "SOUND"
    PLANTED_UNSOUND = "PLANTED_UNSOUND"


# -- theories -----------------------------------------------------------------

@dataclass(frozen=True)
class TheoryFixture:
    """A file whose only form is ``(define theory (lambda (t) ...))``."""

    name: str
    expr: SExpr  # the lambda
    label: Optional[Label] = None
    source: str = ""

    @property
    def theory_size(self) -> int:
        return size(self.expr)

    @classmethod
    def from_source(cls, text: str, name: str = "<theory>") -> "TheoryFixture":
        forms = parse_all(text)
        if len(forms) != 1:
            raise TheoryEvalError(f"{name}: expected exactly one top-level form")
        form = forms[0]
        if not (isinstance(form, tuple) and len(form) == 3 and form[0] == "define"
                and form[1] == "theory"):
            raise TheoryEvalError(f"{name}: expected (define theory <lambda>)")
        body = form[2]
        if not (isinstance(body, tuple) and body and body[0] == "lambda"):
            raise TheoryEvalError(f"{name}: theory must be a lambda expression")
        m = re.search(r"^;\s*label:\s*(\w+)", text, re.MULTILINE)
        label = Label(m.group(1)) if m else None
        return cls(name, body, label, text)

    @classmethod
    def load(cls, path: str | Path) -> "TheoryFixture":
        path = Path(path)
        return cls.from_source(path.read_text(encoding="ascii"), path.stem)


def claim_subject(claim: Any, index: int = 0) -> SExpr:
    """``(elegant (quote E))`` -> E."""
    if (isinstance(claim, tuple) and len(claim) == 2 and claim[0] == "elegant"
            and isinstance(claim[1], tuple) and len(claim[1]) == 2 and claim[1][0] == "quote"):
        return claim[1][1]
    raise MalformedClaim(index, f"not of the form (elegant (quote E)): {print_canonical(claim)}")


def enumerate_claims(theory: TheoryFixture, t: int) -> list[SExpr]:
    """Subjects claimed elegant by ``(theory t)`` evaluated with budget ``t``.

    Running out of budget means nothing has been derived yet and yields [].
    """
    out = evaluate((theory.expr, t), t)
    if out.status.value == "OUT_OF_BUDGET":
        return []
    if not out.ok:
        raise TheoryEvalError(f"{theory.name}: {out.reason}")
    claims = out.value
    if not isinstance(claims, tuple):
        raise MalformedClaim(-1, f"theory returned a non-list {print_canonical(claims)}")
    return [claim_subject(c, i) for i, c in enumerate(claims)]


def _budgets(limit: int):
    t = 1
    while t <= limit:
        yield t
        t *= 2


# -- refuter ------------------------------------------------------------------

@lru_cache(maxsize=1)
def refuter_expr() -> SExpr:
    """The refuter lambda from the bundled ``assets/refuter.lisp``."""
    text = resources.files("aitlab").joinpath("assets/refuter.lisp").read_text(encoding="ascii")
    (form,) = parse_all(text)
    assert form[0] == "define" and form[1] == "refuter"
    return form[2]


def refuter_size() -> int:
    return size(refuter_expr())


def compressor_for(theory: TheoryFixture) -> SExpr:
    return (refuter_expr(), ("quote", theory.expr))


def threshold(theory: TheoryFixture) -> int:
    return theory.theory_size + refuter_size() + GLUE_K


@dataclass(frozen=True)
class CompressionWitness:
    claimed: SExpr
    compressor: SExpr
    value: Any
    compressor_budget: int
    claimed_budget: int

    @property
    def size_compressor(self) -> int:
        return size(self.compressor)

    @property
    def size_claimed(self) -> int:
        return size(self.claimed)

    def verify(self, budget: Optional[int] = None) -> bool:
        """Re-evaluate both programs from scratch and compare."""
        bw = budget or self.compressor_budget
        be = budget or self.claimed_budget
        w = evaluate(self.compressor, bw)
        e = evaluate(self.claimed, be)
        return (w.ok and e.ok and print_canonical(w.value) == print_canonical(e.value)
                and w.value == e.value and size(self.compressor) < size(self.claimed))


@dataclass(frozen=True)
class BoundRespected:
    threshold: int
    claims_examined: int


def berry_refute(theory: TheoryFixture, outer_budget: int) -> CompressionWitness | BoundRespected:
    """Run the refuter on ``theory`` and check its answer independently."""
    n = threshold(theory)
    w = compressor_for(theory)
    assert size(w) == n
    result = evaluate(w, outer_budget)
    if result.status.value == "EVAL_ERROR":
        raise RefuterEvalError(result.reason)

    # Host-side replay of the search to identify the subject.
    subject, examined = None, 0
    for t in _budgets(outer_budget):
        claims = enumerate_claims(theory, t)
        examined = max(examined, len(claims))
        big = next((e for e in claims if size(e) > n), None)
        if big is not None:
            subject = big
            break

    if not result.ok:
        if subject is not None:
            raise NonTerminatingSubject(subject, outer_budget)
        return BoundRespected(n, examined)
    if subject is None:
        raise RefuterEvalError("refuter returned but no claim exceeds the threshold")
    claimed = evaluate(subject, outer_budget)
    if not claimed.ok:
        raise NonTerminatingSubject(subject, outer_budget)
    witness = CompressionWitness(subject, w, result.value, result.budget_spent, claimed.budget_spent)
    if not witness.verify():
        raise RefuterEvalError("compression witness failed verification")
    return witness


class Outcome(str, enum.Enum):
    BOUND_RESPECTED = "BOUND_RESPECTED"
    REFUTED = "REFUTED"


@dataclass(frozen=True)
class HauptsatzReport:
    theory_name: str
    theory_size: int
    refuter_size: int
    glue: int
    threshold: int
    outcome: Outcome
    claims: tuple[SExpr, ...]
    witness: Optional[CompressionWitness] = None

    def text(self) -> str:
        lines = [
            "# Elegance-proof bound: a theory cannot prove elegance of programs",
            "# larger than its own size plus the fixed-size refuter routine.",
            f"theory={self.theory_name}",
            f"theory_size={self.theory_size}",
            f"refuter_size={self.refuter_size}",
            f"glue_K={self.glue}",
            f"threshold={self.threshold}",
            f"claims_examined={len(self.claims)}",
        ]
        for e in self.claims:
            lines.append(f"claim size={size(e)} subject={_clip(print_canonical(e))}")
        lines.append(f"outcome={self.outcome.value}")
        if self.witness is not None:
            w = self.witness
            lines += [
                f"witness_value={print_canonical(w.value)}",
                f"witness_claimed_size={w.size_claimed}",
                f"witness_compressor_size={w.size_compressor}",
                f"witness_claimed={print_canonical(w.claimed)}",
                f"witness_compressor={print_canonical(w.compressor)}",
            ]
        return "\n".join(lines) + "\n"


def _clip(s: str, width: int = 120) -> str:
    return s if len(s) <= width else s[:width - 3] + "..."


def hauptsatz_check(theory: TheoryFixture, outer_budget: int) -> HauptsatzReport:
    result = berry_refute(theory, outer_budget)
    last = 1
    for t in _budgets(outer_budget):
        last = t
    claims = tuple(enumerate_claims(theory, last))
    n = threshold(theory)
    if isinstance(result, CompressionWitness):
        return HauptsatzReport(theory.name, theory.theory_size, refuter_size(), GLUE_K, n,
                               Outcome.REFUTED, claims, result)
    if any(size(e) > n for e in claims):
        raise MetamathError("claim above threshold without a refutation")  # pragma: no cover
    return HauptsatzReport(theory.name, theory.theory_size, refuter_size(), GLUE_K, n,
                           Outcome.BOUND_RESPECTED, claims)


# -- bounded elegance oracle --------------------------------------------------

@dataclass(frozen=True)
class OracleRow:
    expression: SExpr
    size: int
    value: Any  # None unless evaluation returned OK
    status: str
    elegant: bool = False
    certified: bool = False


def expressions_of_size(s: int, vocabulary: Sequence[str] = ORACLE_VOCABULARY) -> list[SExpr]:
    """Every expression whose canonical text over ``vocabulary`` has exactly ``s`` characters."""
    atoms = tuple(parse_all(" ".join(vocabulary)))

    @lru_cache(maxsize=None)
    def exprs(k: int) -> tuple:
        out = [a for a in atoms if len(str(a)) == k]
        if k == 2:
            out.append(())
        if k > 2:
            out.extend(seqs(k - 2))
        return tuple(out)

    @lru_cache(maxsize=None)
    def seqs(k: int) -> tuple:
        out = [(e,) for e in exprs(k)]
        for a in range(1, k - 1):
            for head in exprs(a):
                for rest in seqs(k - a - 1):
                    out.append((head,) + rest)
        return tuple(out)

    return list(exprs(s))


def _value_key(v: Any) -> tuple:
    return (type(v).__name__, print_canonical(v))


def bounded_elegance_oracle(max_chars: int = ORACLE_CAP, vocabulary: Sequence[str] = ORACLE_VOCABULARY,
                            budget: int = 1000, cap: int = ORACLE_CAP) -> list[OracleRow]:
    """Evaluate every expression up to ``max_chars`` and mark the smallest producer of each value.

    A value's minimal producers are certified only if no budget-exhausted
    expression is strictly smaller (it might have produced the value).
    """
    if max_chars > cap:
        raise CapExceeded(f"max_chars {max_chars} exceeds cap {cap}")
    raw = []
    first_undecided = None
    for s in range(1, max_chars + 1):
        for e in expressions_of_size(s, vocabulary):
            out = evaluate(e, budget)
            raw.append((e, s, out))
            if out.status.value == "OUT_OF_BUDGET" and first_undecided is None:
                first_undecided = s
    best: dict[tuple, int] = {}
    for e, s, out in raw:
        if out.ok:
            key = _value_key(out.value)
            best.setdefault(key, s)
    rows = []
    for e, s, out in raw:
        if out.ok:
            is_min = best[_value_key(out.value)] == s
            rows.append(OracleRow(e, s, out.value, out.status.value, is_min,
                                  is_min and (first_undecided is None or s <= first_undecided)))
        else:
            rows.append(OracleRow(e, s, None, out.status.value))
    return rows


def elegance_growth(rows: Sequence[OracleRow], max_chars: int) -> list[tuple[int, int]]:
    """(k, number of certified elegance facts of size <= k) for k = 1..max_chars."""
    return [(k, sum(1 for r in rows if r.certified and r.size <= k)) for k in range(1, max_chars + 1)]
