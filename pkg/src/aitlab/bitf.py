"""BitF: a bit-cell, right-unbounded Brainfuck-style toy machine.

Seven instructions, each a 3-bit opcode::

    >  000   move head right
    <  001   move head left (no-op at cell 0)
    +  010   toggle current bit
    .  011   append current bit to output
    [  100   if bit is 0 jump past matching ]
    ]  101   if bit is 1 jump back to matching [
    !  110   halt

Opcode 111 is never valid.  A program must contain exactly one ``!`` and it
must be the last symbol, which makes the set of valid bit strings prefix-free.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

MACHINE_TAG = "bitf-v1"

SYMBOLS = "><+.[]!"
CODES = {s: format(i, "03b") for i, s in enumerate(SYMBOLS)}
_BY_CODE = {c: s for s, c in CODES.items()}
NON_HALT = SYMBOLS[:-1]


class BitfError(ValueError):
    """Base class for decoding failures."""


class BadLength(BitfError):
    def __init__(self, length: int):
        super().__init__(f"bit length {length} is not a multiple of 3")
        self.length = length


class InvalidOpcode(BitfError):
    def __init__(self, position: int):
        super().__init__(f"opcode 111 at symbol position {position}")
        self.position = position


class SyntaxViolation(BitfError):
    def __init__(self, report: "ValidityReport"):
        super().__init__(f"invalid program: {report.reason} at position {report.position}")
        self.report = report


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    reason: str = ""
    position: int = -1

    def __bool__(self) -> bool:
        return self.valid


def validate(symbols: Iterable[str]) -> ValidityReport:
    """Check the program invariants, reporting the first violation found."""
    syms = list(symbols)
    if not syms:
        return ValidityReport(False, "empty program", 0)
    open_at: list[int] = []
    for i, s in enumerate(syms):
        if s not in CODES:
            return ValidityReport(False, f"unknown symbol {s!r}", i)
        if s == "!":
            if i != len(syms) - 1:
                return ValidityReport(False, "'!' must be unique and final", i)
            if open_at:
                return ValidityReport(False, "unbalanced '['", open_at[0])
        elif s == "[":
            open_at.append(i)
        elif s == "]":
            if not open_at:
                return ValidityReport(False, "unmatched ']'", i)
            open_at.pop()
    if syms[-1] != "!":
        if open_at:
            return ValidityReport(False, "unbalanced '['", open_at[0])
        return ValidityReport(False, "missing final '!'", len(syms))
    return ValidityReport(True)


@dataclass(frozen=True)
class BitfProgram:
    """A validated BitF program.  Construct via :meth:`from_text` or :func:`decode_bits`."""

    text: str
    jumps: tuple[int, ...] = field(repr=False, compare=False, hash=False, default=())

    def __post_init__(self) -> None:
        report = validate(self.text)
        if not report:
            raise SyntaxViolation(report)
        if not self.jumps:
            object.__setattr__(self, "jumps", _jump_table(self.text))

    @classmethod
    def from_text(cls, text: str) -> "BitfProgram":
        return cls(text)

    @property
    def symbols(self) -> str:
        return self.text

    @property
    def bit_length(self) -> int:
        return 3 * len(self.text)

    def __len__(self) -> int:
        return len(self.text)

    def __str__(self) -> str:
        return self.text


def _jump_table(text: str) -> tuple[int, ...]:
    table = [0] * len(text)
    stack = []
    for i, s in enumerate(text):
        if s == "[":
            stack.append(i)
        elif s == "]":
            j = stack.pop()
            table[i], table[j] = j, i
    return tuple(table)


def encode_bits(program: BitfProgram) -> str:
    return "".join(CODES[s] for s in program.text)


def decode_bits(bits: str) -> BitfProgram:
    if len(bits) % 3:
        raise BadLength(len(bits))
    syms = []
    for k in range(0, len(bits), 3):
        code = bits[k:k + 3]
        if code not in _BY_CODE:
            if code == "111":
                raise InvalidOpcode(k // 3)
            raise BitfError(f"non-binary characters in {code!r}")
        syms.append(_BY_CODE[code])
    report = validate(syms)
    if not report:
        raise SyntaxViolation(report)
    return BitfProgram("".join(syms))


class Verdict(str, enum.Enum):
    HALTED = "HALTED"
    DIVERGED = "DIVERGED"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class CycleEvidence:
    """A machine state seen at ``first_step`` and again at ``repeat_step``.

    ``tape`` packs the cells into an int, bit i = cell i.
    """

    ip: int
    head: int
    tape: int
    first_step: int
    repeat_step: int


@dataclass(frozen=True)
class RunOutcome:
    verdict: Verdict
    steps: int
    output: Optional[str] = None
    divergence_evidence: Optional[CycleEvidence] = None


@dataclass
class MachineState:
    ip: int = 0
    head: int = 0
    tape: int = 0
    output: list = field(default_factory=list)
    steps: int = 0

    def fingerprint(self) -> tuple[int, int, int]:
        return (self.ip, self.head, self.tape)


class Machine:
    """Resumable executor for one program; :meth:`advance` runs up to a step budget.

    Cycle detection records the state each time a backward jump is taken.
    Any recurrent run passes through a taken ``]``, so a recurrence of the
    full state implies a recurrence at one of those checkpoints.
    """

    def __init__(self, program: BitfProgram, detect_cycles: bool = True):
        self.program = program
        self.state = MachineState()
        self.detect_cycles = detect_cycles
        self.verdict: Optional[Verdict] = None
        self.evidence: Optional[CycleEvidence] = None
        self._seen: dict[tuple[int, int, int], int] = {}

    def advance(self, max_steps: int) -> Optional[Verdict]:
        """Execute until halted, cycle found, or ``state.steps == max_steps``."""
        if self.verdict is not None:
            return self.verdict
        text = self.program.text
        jumps = self.program.jumps
        st = self.state
        ip, head, tape, steps = st.ip, st.head, st.tape, st.steps
        out = st.output
        seen = self._seen if self.detect_cycles else None
        while steps < max_steps:
            op = text[ip]
            steps += 1
            if op == ">":
                head += 1
                ip += 1
            elif op == "<":
                if head:
                    head -= 1
                ip += 1
            elif op == "+":
                tape ^= 1 << head
                ip += 1
            elif op == ".":
                out.append("1" if (tape >> head) & 1 else "0")
                ip += 1
            elif op == "[":
                ip = jumps[ip] + 1 if not (tape >> head) & 1 else ip + 1
            elif op == "]":
                if (tape >> head) & 1:
                    ip = jumps[ip]
                    if seen is not None:
                        key = (ip, head, tape)
                        first = seen.get(key)
                        if first is not None:
                            self.evidence = CycleEvidence(ip, head, tape, first, steps)
                            self.verdict = Verdict.DIVERGED
                            break
                        seen[key] = steps
                else:
                    ip += 1
            else:
                self.verdict = Verdict.HALTED
                break
        st.ip, st.head, st.tape, st.steps = ip, head, tape, steps
        return self.verdict

    def outcome(self) -> RunOutcome:
        st = self.state
        if self.verdict is Verdict.HALTED:
            return RunOutcome(Verdict.HALTED, st.steps, "".join(st.output))
        if self.verdict is Verdict.DIVERGED:
            return RunOutcome(Verdict.DIVERGED, st.steps, None, self.evidence)
        return RunOutcome(Verdict.TIMEOUT, st.steps)


def run(program: BitfProgram, max_steps: int, detect_cycles: bool = True) -> RunOutcome:
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    m = Machine(program, detect_cycles)
    m.advance(max_steps)
    return m.outcome()


def replay_cycle(program: BitfProgram, evidence: CycleEvidence) -> bool:
    """Independently confirm a divergence certificate.

    Re-executes from scratch with a plain step loop and checks that the
    state at ``first_step`` equals the state at ``repeat_step``.
    """
    if evidence.repeat_step <= evidence.first_step:
        return False
    states = {}
    text, ip, head, cells = program.text, 0, 0, {}
    for step in range(1, evidence.repeat_step + 1):
        op = text[ip]
        bit = cells.get(head, 0)
        if op == "!":
            return False
        if op == ">":
            head, ip = head + 1, ip + 1
        elif op == "<":
            head, ip = max(head - 1, 0), ip + 1
        elif op == "+":
            cells[head] = 1 - bit
            ip += 1
        elif op == ".":
            ip += 1
        elif op == "[":
            ip = (_match(text, ip) + 1) if bit == 0 else ip + 1
        elif op == "]":
            ip = _match(text, ip) if bit == 1 else ip + 1
        if step in (evidence.first_step, evidence.repeat_step):
            live = tuple(sorted(k for k, v in cells.items() if v))
            states[step] = (ip, head, live)
    return states[evidence.first_step] == states[evidence.repeat_step]


def _match(text: str, i: int) -> int:
    opener = text[i]
    closer = "]" if opener == "[" else "["
    step = 1 if opener == "[" else -1
    depth = 0
    while True:
        if text[i] == opener:
            depth += 1
        elif text[i] == closer:
            depth -= 1
        if depth == 0:
            return i
        i += step
