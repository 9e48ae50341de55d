"""TinyLISP: a small LISP with budgeted evaluation and a ``size`` primitive.

Values are plain Python objects: ``str`` for symbols, ``int`` for integers,
``tuple`` for lists, plus :class:`Closure` and :class:`Primitive`.

Cost model: every eval event and every apply event costs one unit.
``(run b e)`` evaluates the data ``e`` in the global environment with an
inner budget of ``b`` units (charged to the outer budget as well) and
returns ``(ok v)`` or ``fail``.
"""
from __future__ import annotations

import enum
import re
import sys
from dataclasses import dataclass
from typing import Any, Optional, Union

SExpr = Union[str, int, tuple]

SPECIAL_FORMS = frozenset({"quote", "if", "lambda", "define"})
MAX_DEPTH = 1500

_RECURSION_LIMIT = 4 * MAX_DEPTH + 2000
if sys.getrecursionlimit() < _RECURSION_LIMIT:
    sys.setrecursionlimit(_RECURSION_LIMIT)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvalError(Exception):
    pass


class _Exhausted(Exception):
    def __init__(self, level: int):
        self.level = level


# -- reader / printer ---------------------------------------------------------

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_INT = re.compile(r"-?\d+")


def _tokenize(text: str) -> list[tuple[str, int]]:
    if not text.isascii():
        pos = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise ParseError("non-ASCII character", pos)
    out = []
    for m in _TOKEN.finditer(text):
        tok = m.group()
        if tok[0].isspace() or tok[0] == ";":
            continue
        out.append((tok, m.start()))
    return out


def _atom(tok: str) -> SExpr:
    if _INT.fullmatch(tok):
        return int(tok)
    return tok.lower()


def _read(tokens: list[tuple[str, int]], i: int) -> tuple[SExpr, int]:
    tok, pos = tokens[i]
    if tok == ")":
        raise ParseError("unexpected ')'", pos)
    if tok != "(":
        return _atom(tok), i + 1
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise ParseError("unbalanced '('", pos)
        if tokens[i][0] == ")":
            return tuple(items), i + 1
        item, i = _read(tokens, i)
        items.append(item)


def parse_all(text: str) -> list[SExpr]:
    tokens = _tokenize(text)
    forms, i = [], 0
    while i < len(tokens):
        form, i = _read(tokens, i)
        forms.append(form)
    return forms


def parse(text: str) -> SExpr:
    """Read exactly one expression."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    form, i = _read(tokens, 0)
    if i != len(tokens):
        raise ParseError("trailing input", tokens[i][1])
    return form


def print_canonical(e: Any) -> str:
    if isinstance(e, tuple):
        return "(" + " ".join(print_canonical(x) for x in e) + ")"
    if isinstance(e, Closure):
        return print_canonical(("lambda", e.params, e.body))
    if isinstance(e, Primitive):
        return e.name
    return str(e)


def size(e: Any) -> int:
    return len(print_canonical(e))


# -- runtime ------------------------------------------------------------------

@dataclass(frozen=True)
class Closure:
    params: tuple
    body: SExpr
    env: Optional["Frame"]

    def __eq__(self, other):
        return self is other

    __hash__ = object.__hash__


@dataclass(frozen=True)
class Primitive:
    name: str
    arity: int


class Frame:
    __slots__ = ("vars", "parent")

    def __init__(self, vars: dict, parent: Optional["Frame"]):
        self.vars = vars
        self.parent = parent


PRIMITIVES = {name: Primitive(name, arity) for name, arity in [
    ("atom", 1), ("eq", 2), ("car", 1), ("cdr", 1), ("cons", 2),
    ("+", 2), ("<", 2), ("size", 1), ("run", 2),
]}

T, NIL, FAIL, OK = "t", "nil", "fail", "ok"


def is_atom(x: Any) -> bool:
    return not (isinstance(x, tuple) and x)


def truthy(x: Any) -> bool:
    return not (x == NIL or (isinstance(x, int) and x == 0))


class Status(str, enum.Enum):
    OK = "OK"
    OUT_OF_BUDGET = "OUT_OF_BUDGET"
    EVAL_ERROR = "EVAL_ERROR"


@dataclass(frozen=True)
class EvalOutcome:
    status: Status
    budget_spent: int
    value: Any = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OK

    def render(self) -> str:
        return print_canonical(self.value) if self.ok else FAIL


class Interpreter:
    """A global environment plus the evaluator.

    Top-level ``define`` forms extend the globals until :meth:`freeze`.
    """

    def __init__(self):
        self.globals: dict[str, Any] = dict(PRIMITIVES)
        self.frozen = False
        self._spent = 0
        self._ceilings: list[int] = []
        self._limit = 0
        self._depth = 0

    # budget bookkeeping
    def _tick(self) -> None:
        self._spent += 1
        if self._spent > self._limit:
            for level, ceiling in enumerate(self._ceilings):
                if self._spent > ceiling:
                    raise _Exhausted(level)

    def _push(self, budget: int) -> int:
        self._ceilings.append(self._spent + budget)
        self._limit = min(self._limit, self._ceilings[-1]) if len(self._ceilings) > 1 else self._ceilings[-1]
        return len(self._ceilings) - 1

    def _pop(self) -> None:
        self._ceilings.pop()
        self._limit = min(self._ceilings) if self._ceilings else 0

    def freeze(self) -> None:
        self.frozen = True

    def eval(self, expr: SExpr, budget: int) -> EvalOutcome:
        """Evaluate one top-level form with a fresh budget."""
        if budget < 1:
            raise ValueError("budget must be >= 1")
        self._spent = 0
        self._depth = 0
        self._ceilings = []
        self._push(budget)
        try:
            if isinstance(expr, tuple) and expr and expr[0] == "define":
                value = self._define(expr)
            else:
                value = self._eval(expr, None)
            return EvalOutcome(Status.OK, self._spent, value)
        except _Exhausted:
            return EvalOutcome(Status.OUT_OF_BUDGET, budget, reason="budget exhausted")
        except EvalError as exc:
            return EvalOutcome(Status.EVAL_ERROR, self._spent, reason=str(exc))
        finally:
            self._ceilings = []
            self._limit = 0

    def load(self, text: str, budget: int) -> EvalOutcome:
        """Evaluate every top-level form in ``text``, sharing ``budget``; returns the last outcome."""
        forms = parse_all(text)
        outcome = EvalOutcome(Status.OK, 0, NIL)
        remaining = budget
        spent = 0
        for form in forms:
            if remaining < 1:
                return EvalOutcome(Status.OUT_OF_BUDGET, spent, reason="budget exhausted")
            outcome = self.eval(form, remaining)
            spent += outcome.budget_spent
            remaining -= outcome.budget_spent
            outcome = EvalOutcome(outcome.status, spent, outcome.value, outcome.reason)
            if not outcome.ok:
                return outcome
        return outcome

    def _define(self, expr: tuple) -> str:
        self._tick()
        if self.frozen:
            raise EvalError("global environment is frozen")
        if len(expr) != 3 or not isinstance(expr[1], str):
            raise EvalError("define takes a symbol and an expression")
        name = expr[1]
        if name in self.globals or name in SPECIAL_FORMS or name in (T, NIL):
            raise EvalError(f"redefinition of {name}")
        value = self._eval(expr[2], None)
        self.globals[name] = value
        return name

    def _lookup(self, name: str, env: Optional[Frame]) -> Any:
        f = env
        while f is not None:
            if name in f.vars:
                return f.vars[name]
            f = f.parent
        if name == T or name == NIL:
            return name
        try:
            return self.globals[name]
        except KeyError:
            raise EvalError(f"unbound symbol {name}") from None

    def _eval(self, e: Any, env: Optional[Frame]) -> Any:
        self._depth += 1
        if self._depth > MAX_DEPTH:
            self._depth -= 1
            raise EvalError("maximum nesting depth exceeded")
        try:
            while True:
                self._tick()
                if isinstance(e, str):
                    return self._lookup(e, env)
                if not isinstance(e, tuple) or not e:
                    return e
                head = e[0]
                if head == "quote":
                    if len(e) != 2:
                        raise EvalError("quote takes one argument")
                    return e[1]
                if head == "if":
                    if len(e) != 4:
                        raise EvalError("if takes three arguments")
                    e = e[2] if truthy(self._eval(e[1], env)) else e[3]
                    continue
                if head == "lambda":
                    if len(e) != 3 or not isinstance(e[1], tuple) \
                            or not all(isinstance(p, str) for p in e[1]) or len(set(e[1])) != len(e[1]):
                        raise EvalError("malformed lambda")
                    return Closure(e[1], e[2], env)
                if head == "define":
                    raise EvalError("define is only allowed at top level")
                fn = self._eval(head, env)
                args = [self._eval(a, env) for a in e[1:]]
                self._tick()
                if isinstance(fn, Closure):
                    if len(args) != len(fn.params):
                        raise EvalError(f"arity mismatch: expected {len(fn.params)}, got {len(args)}")
                    env = Frame(dict(zip(fn.params, args)), fn.env)
                    e = fn.body
                    continue
                if isinstance(fn, Primitive):
                    if len(args) != fn.arity:
                        raise EvalError(f"{fn.name}: arity mismatch")
                    return self._apply_primitive(fn.name, args)
                raise EvalError(f"not a function: {print_canonical(fn)}")
        finally:
            self._depth -= 1

    def _apply_primitive(self, name: str, args: list) -> Any:
        if name == "atom":
            return T if is_atom(args[0]) else NIL
        if name == "eq":
            a, b = args
            if not (is_atom(a) and is_atom(b)):
                return NIL
            if isinstance(a, (Closure, Primitive)) or isinstance(b, (Closure, Primitive)):
                return T if a is b else NIL
            return T if type(a) is type(b) and a == b else NIL
        if name in ("car", "cdr"):
            x = args[0]
            if is_atom(x):
                raise EvalError(f"{name} of atom {print_canonical(x)}")
            return x[0] if name == "car" else x[1:]
        if name == "cons":
            if not isinstance(args[1], tuple):
                raise EvalError("cons onto a non-list")
            return (args[0],) + args[1]
        if name in ("+", "<"):
            a, b = args
            if not (type(a) is int and type(b) is int):
                raise EvalError(f"{name} expects integers")
            if name == "+":
                return a + b
            return T if a < b else NIL
        if name == "size":
            return size(args[0])
        if name == "run":
            return self._run(*args)
        raise EvalError(f"unknown primitive {name}")  # pragma: no cover

    def _run(self, budget: Any, expr: Any) -> Any:
        if type(budget) is not int:
            raise EvalError("run budget must be an integer")
        if budget < 1:
            return FAIL
        level = self._push(budget)
        try:
            value = self._eval(expr, None)
        except _Exhausted as exc:
            if exc.level < level:
                raise
            return FAIL
        except EvalError:
            return FAIL
        finally:
            self._pop()
        return (OK, value)


def evaluate(expr: SExpr, budget: int, interp: Optional[Interpreter] = None) -> EvalOutcome:
    """Evaluate ``expr`` in ``interp`` (a fresh empty one by default)."""
    return (interp or Interpreter()).eval(expr, budget)
