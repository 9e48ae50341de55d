"""Exhaustive program generation, dovetailed execution and the halting database."""
from __future__ import annotations

import enum
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Iterator, Optional

from .bitf import NON_HALT, BitfProgram, Machine, Verdict, decode_bits, encode_bits, BitfError

DB_VERSION = "v1"


class Status(str, enum.Enum):
    HALTED = "HALTED"
    DIVERGED = "DIVERGED"
    UNDECIDED = "UNDECIDED"


class DatabaseError(Exception):
    pass


class StorageFailure(DatabaseError):
    pass


class CorruptRecord(DatabaseError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class VersionMismatch(DatabaseError):
    pass


class IncompleteDatabase(DatabaseError):
    pass


class VerdictConflict(DatabaseError):
    def __init__(self, bits: str):
        super().__init__(f"conflicting decided verdicts for program {bits}")
        self.bits = bits


@dataclass(frozen=True)
class HaltingRecord:
    program_bits: str
    status: Status
    steps: int
    budget_used: int
    output: Optional[str] = None

    @property
    def symbols_len(self) -> int:
        return len(self.program_bits) // 3

    @property
    def bit_length(self) -> int:
        return len(self.program_bits)

    @property
    def decided(self) -> bool:
        return self.status is not Status.UNDECIDED

    def program(self) -> BitfProgram:
        return decode_bits(self.program_bits)

    def to_line(self) -> str:
        out = self.output if self.status is Status.HALTED else "-"
        return (f"bits={self.program_bits} status={self.status.value} steps={self.steps} "
                f"budget={self.budget_used} output={out or '-'}")


def canonical_key(bits: str) -> tuple[int, str]:
    return (len(bits), bits)


@dataclass
class HaltingDatabase:
    max_symbols: int
    max_steps: int
    records: dict[str, HaltingRecord] = field(default_factory=dict)
    version: str = DB_VERSION

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[HaltingRecord]:
        for bits in sorted(self.records, key=canonical_key):
            yield self.records[bits]

    def __getitem__(self, key: str | BitfProgram) -> HaltingRecord:
        if isinstance(key, BitfProgram):
            key = encode_bits(key)
        return self.records[key]

    def __contains__(self, key) -> bool:
        if isinstance(key, BitfProgram):
            key = encode_bits(key)
        return key in self.records

    def __eq__(self, other) -> bool:
        if not isinstance(other, HaltingDatabase):
            return NotImplemented
        return (self.max_symbols, self.max_steps, self.version, self.records) == \
            (other.max_symbols, other.max_steps, other.version, other.records)

    def counts(self) -> dict[Status, int]:
        c = {s: 0 for s in Status}
        for r in self.records.values():
            c[r.status] += 1
        return c

    def is_complete(self) -> bool:
        per_len: dict[int, int] = {}
        for r in self.records.values():
            per_len[r.symbols_len] = per_len.get(r.symbols_len, 0) + 1
        if any(n > self.max_symbols for n in per_len):
            return False
        return all(per_len.get(n, 0) == count_valid(n) for n in range(1, self.max_symbols + 1))

    def dumps(self) -> str:
        lines = [f"bitf-db {self.version} L={self.max_symbols} T={self.max_steps}"]
        lines += [r.to_line() for r in self]
        return "\n".join(lines) + "\n"


def gen_valid(n: int) -> Iterator[BitfProgram]:
    """Every valid ``n``-symbol program, in lexicographic symbol (= bit) order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    body = n - 1
    buf: list[str] = []

    def rec(depth: int) -> Iterator[str]:
        remaining = body - len(buf)
        if remaining == 0:
            if depth == 0:
                yield "".join(buf) + "!"
            return
        for s in NON_HALT:
            if s == "[":
                if depth + 1 > remaining - 1:
                    continue
                d = depth + 1
            elif s == "]":
                if depth == 0:
                    continue
                d = depth - 1
            else:
                if depth > remaining - 1:
                    continue
                d = depth
            buf.append(s)
            yield from rec(d)
            buf.pop()

    for text in rec(0):
        yield BitfProgram(text)


@lru_cache(maxsize=None)
def count_valid(n: int) -> int:
    """Number of valid ``n``-symbol programs, by DP over bracket depth."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ways = [1]  # ways[d]: prefixes ending at depth d
    for _ in range(n - 1):
        nxt = [0] * (len(ways) + 1)
        for d, w in enumerate(ways):
            if not w:
                continue
            nxt[d] += 4 * w
            nxt[d + 1] += w
            if d:
                nxt[d - 1] += w
        ways = nxt
    return ways[0]


def _partition_bounds(total: int, parts: int) -> list[tuple[int, int]]:
    base, extra = divmod(total, parts)
    bounds, start = [], 0
    for i in range(parts):
        end = start + base + (1 if i < extra else 0)
        bounds.append((start, end))
        start = end
    return bounds


def _budget_schedule(max_steps: int) -> list[int]:
    sched, t = [], 1
    while t < max_steps:
        sched.append(t)
        t *= 2
    sched.append(max_steps)
    return sched


def run_slice(n: int, start: int, end: int, max_steps: int,
              detect_cycles: bool = True) -> list[HaltingRecord]:
    """Dovetail the ``n``-symbol programs with canonical indices in ``[start, end)``.

    Budgets double each round; every still-running machine gets its turn
    before any machine gets more time.
    """
    machines = [Machine(p, detect_cycles) for p in islice(gen_valid(n), start, end)]
    active = list(range(len(machines)))
    for budget in _budget_schedule(max_steps):
        still = []
        for i in active:
            if machines[i].advance(budget) is None:
                still.append(i)
        active = still
        if not active:
            break
    records = []
    for m in machines:
        o = m.outcome()
        bits = encode_bits(m.program)
        if o.verdict is Verdict.HALTED:
            records.append(HaltingRecord(bits, Status.HALTED, o.steps, max_steps, o.output))
        elif o.verdict is Verdict.DIVERGED:
            records.append(HaltingRecord(bits, Status.DIVERGED, o.steps, max_steps))
        else:
            records.append(HaltingRecord(bits, Status.UNDECIDED, o.steps, max_steps))
    return records


def _run_task(task):
    return run_slice(*task)


def dovetail(max_symbols: int, max_steps: int, partitions: int = 1,
             jobs: Optional[int] = None, detect_cycles: bool = True) -> HaltingDatabase:
    """Run every valid program of up to ``max_symbols`` symbols for ``max_steps`` steps.

    Each length class is cut into ``partitions`` contiguous index ranges; the
    slices are merged back in canonical order, so the result does not depend
    on ``partitions`` or ``jobs``.
    """
    if max_symbols < 1 or max_steps < 1 or partitions < 1:
        raise ValueError("max_symbols, max_steps and partitions must be >= 1")
    tasks = []
    for n in range(1, max_symbols + 1):
        for start, end in _partition_bounds(count_valid(n), partitions):
            if end > start:
                tasks.append((n, start, end, max_steps, detect_cycles))
    jobs = jobs or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    db = HaltingDatabase(max_symbols, max_steps)
    for chunk in chunks:
        for rec in chunk:
            db.records[rec.program_bits] = rec
    return db


def _prefer(a: HaltingRecord, b: HaltingRecord) -> HaltingRecord:
    if a.decided and b.decided:
        if a.status is not b.status:
            raise VerdictConflict(a.program_bits)
        if a.status is Status.HALTED and (a.output, a.steps) != (b.output, b.steps):
            raise VerdictConflict(a.program_bits)
    elif a.decided != b.decided:
        return a if a.decided else b
    return a if a.budget_used >= b.budget_used else b


def merge(a: HaltingDatabase, b: HaltingDatabase) -> HaltingDatabase:
    if a.version != b.version:
        raise VersionMismatch(f"cannot merge {a.version} with {b.version}")
    out = HaltingDatabase(max(a.max_symbols, b.max_symbols), max(a.max_steps, b.max_steps),
                          dict(a.records), a.version)
    for bits, rec in b.records.items():
        mine = out.records.get(bits)
        out.records[bits] = rec if mine is None else _prefer(mine, rec)
    return out


def save(db: HaltingDatabase, path: str | os.PathLike) -> None:
    try:
        Path(path).write_text(db.dumps(), encoding="ascii")
    except OSError as exc:
        raise StorageFailure(str(exc)) from exc


_HEADER = re.compile(r"bitf-db (v\d+) L=(\d+) T=(\d+)")
_LINE = re.compile(r"bits=([01]+) status=(HALTED|DIVERGED|UNDECIDED) steps=(\d+) "
                   r"budget=(\d+) output=([01]+|-)")


def loads(text: str, require_complete: bool = True) -> HaltingDatabase:
    lines = text.splitlines()
    if not lines:
        raise CorruptRecord(1, "missing header")
    m = _HEADER.fullmatch(lines[0])
    if not m:
        if lines[0].startswith("bitf-db "):
            raise VersionMismatch(lines[0])
        raise CorruptRecord(1, "bad header")
    if m.group(1) != DB_VERSION:
        raise VersionMismatch(f"file is {m.group(1)}, reader is {DB_VERSION}")
    db = HaltingDatabase(int(m.group(2)), int(m.group(3)))
    prev = None
    for lineno, line in enumerate(lines[1:], start=2):
        rm = _LINE.fullmatch(line)
        if not rm:
            raise CorruptRecord(lineno, "malformed record")
        bits, status, steps, budget, out = rm.groups()
        try:
            decode_bits(bits)
        except BitfError as exc:
            raise CorruptRecord(lineno, str(exc)) from exc
        status = Status(status)
        steps, budget = int(steps), int(budget)
        if prev is not None and canonical_key(bits) <= canonical_key(prev):
            raise CorruptRecord(lineno, "records out of canonical order or duplicated")
        if len(bits) // 3 > db.max_symbols or budget > db.max_steps:
            raise CorruptRecord(lineno, "record exceeds header limits")
        if status is Status.HALTED:
            if steps > budget:
                raise CorruptRecord(lineno, "halted after more steps than budget")
            output = "" if out == "-" else out
        else:
            if out != "-":
                raise CorruptRecord(lineno, "output on non-halted record")
            output = None
        db.records[bits] = HaltingRecord(bits, status, steps, budget, output)
        prev = bits
    if require_complete and not db.is_complete():
        raise IncompleteDatabase(f"database does not cover every program of <= {db.max_symbols} symbols")
    return db


def load(path: str | os.PathLike, require_complete: bool = True) -> HaltingDatabase:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise StorageFailure(str(exc)) from exc
    return loads(text, require_complete)
