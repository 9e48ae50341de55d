"""Program-size complexity tables and elegant programs over a halting database."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Optional

from .bitf import BitfProgram, decode_bits, encode_bits
from .enumeration import HaltingDatabase, Status, canonical_key, count_valid


@dataclass(frozen=True)
class ComplexityEntry:
    output: str
    c_bits: int
    witnesses: tuple[str, ...]  # program bit strings, canonical order
    exact: bool

    @property
    def first_witness(self) -> BitfProgram:
        return decode_bits(self.witnesses[0])


@dataclass(frozen=True)
class EleganceRecord:
    program: BitfProgram
    output: str
    certified: bool


@dataclass(frozen=True)
class NotCovered:
    data: str


@dataclass
class ComplexityTable:
    max_symbols: int
    max_steps: int
    entries: dict[str, ComplexityEntry] = field(default_factory=dict)
    # smallest symbol count with an undecided (or missing) program; None if all decided
    first_undecided: Optional[int] = None

    def __getitem__(self, output: str) -> ComplexityEntry:
        return self.entries[output]

    def __contains__(self, output: str) -> bool:
        return output in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def rows(self) -> list[ComplexityEntry]:
        return [self.entries[k] for k in sorted(self.entries, key=canonical_key)]

    def complexity(self, output: str) -> Optional[int]:
        e = self.entries.get(output)
        return e.c_bits if e else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["output", "c_bits", "exact", "witness_bits", "witness_count"])
        for e in self.rows():
            w.writerow([e.output, e.c_bits, str(e.exact).lower(), e.witnesses[0], len(e.witnesses)])
        return buf.getvalue()


def _first_undecided(db: HaltingDatabase) -> Optional[int]:
    per_len: dict[int, int] = {}
    worst = None
    for r in db.records.values():
        per_len[r.symbols_len] = per_len.get(r.symbols_len, 0) + 1
        if not r.decided and (worst is None or r.symbols_len < worst):
            worst = r.symbols_len
    for n in range(1, db.max_symbols + 1):
        if per_len.get(n, 0) < count_valid(n):
            worst = n if worst is None else min(worst, n)
            break
    return worst


def build_table(db: HaltingDatabase) -> ComplexityTable:
    best: dict[str, list[str]] = {}
    for rec in db:
        if rec.status is not Status.HALTED:
            continue
        cur = best.get(rec.output)
        if cur is None or len(rec.program_bits) < len(cur[0]):
            best[rec.output] = [rec.program_bits]
        elif len(rec.program_bits) == len(cur[0]):
            cur.append(rec.program_bits)
    first = _first_undecided(db)
    table = ComplexityTable(db.max_symbols, db.max_steps, first_undecided=first)
    for out, ws in best.items():
        c_bits = len(ws[0])
        exact = first is None or c_bits // 3 <= first
        table.entries[out] = ComplexityEntry(out, c_bits, tuple(sorted(ws, key=canonical_key)), exact)
    return table


def elegant(db: HaltingDatabase, table: Optional[ComplexityTable] = None) -> list[EleganceRecord]:
    """All halting programs with no strictly smaller producer of their output, ties included."""
    table = table or build_table(db)
    out = []
    for rec in db:
        if rec.status is not Status.HALTED:
            continue
        entry = table.entries[rec.output]
        if rec.bit_length == entry.c_bits:
            out.append(EleganceRecord(rec.program(), rec.output, entry.exact))
    return out


def best_theory(data: str, table: ComplexityTable) -> EleganceRecord | NotCovered:
    """The canonical-first elegant program for ``data``: the shortest explanation on record."""
    entry = table.entries.get(data)
    if entry is None:
        return NotCovered(data)
    return EleganceRecord(entry.first_witness, data, entry.exact)


class InsufficientCoverage(Exception):
    pass


@dataclass(frozen=True)
class SlackRow:
    program: BitfProgram
    encoding: str
    size_bits: int
    encoding_complexity: int
    slack: int


@dataclass(frozen=True)
class IrreducibilityReport:
    c_emp: int
    max_slack: int
    rows: tuple[SlackRow, ...]


def irreducibility_constant(table: ComplexityTable) -> IrreducibilityReport:
    """Measure how far an elegant program's own text can be compressed.

    For each certified elegant program p whose encoding s has an exact entry,
    slack(p) = |p| - C(s).  ``max_slack`` is the raw maximum and may be
    negative; ``c_emp = max(0, max_slack)`` is the least non-negative constant
    with C(s) >= |p| - c_emp over every covered program.
    """
    rows = []
    for entry in table.rows():
        if not entry.exact:
            continue
        for bits in entry.witnesses:
            enc_entry = table.entries.get(bits)
            if enc_entry is None or not enc_entry.exact:
                continue
            p = decode_bits(bits)
            rows.append(SlackRow(p, bits, len(bits), enc_entry.c_bits, len(bits) - enc_entry.c_bits))
    if not rows:
        raise InsufficientCoverage(
            f"no elegant program's encoding has an exact entry at L={table.max_symbols}")
    max_slack = max(r.slack for r in rows)
    return IrreducibilityReport(max(0, max_slack), max_slack, tuple(rows))


# -- independent oracle -------------------------------------------------------
# Deliberately shares nothing with the database path: its own syntax check,
# its own interpreter (dict tape, no cycle detection), its own enumeration.

def _naive_valid(text: str) -> bool:
    depth = 0
    for ch in text:
        depth += {"[": 1, "]": -1}.get(ch, 0)
        if depth < 0:
            return False
    return depth == 0


def _naive_run(text: str, max_steps: int) -> Optional[str]:
    ip, head, cells, out = 0, 0, {}, []
    for _ in range(max_steps):
        op = text[ip]
        bit = cells.get(head, 0)
        if op == "!":
            return "".join(out)
        if op == ">":
            head += 1
        elif op == "<":
            head = max(0, head - 1)
        elif op == "+":
            cells[head] = bit ^ 1
        elif op == ".":
            out.append(str(bit))
        elif op == "[" and bit == 0:
            depth = 1
            while depth:
                ip += 1
                depth += {"[": 1, "]": -1}.get(text[ip], 0)
        elif op == "]" and bit == 1:
            depth = 1
            while depth:
                ip -= 1
                depth += {"]": 1, "[": -1}.get(text[ip], 0)
            continue
        ip += 1
    return None


@lru_cache(maxsize=None)
def _naive_outputs(n: int, max_steps: int) -> frozenset:
    found = set()
    for body in product("><+.[]", repeat=n - 1):
        text = "".join(body) + "!"
        if _naive_valid(text):
            out = _naive_run(text, max_steps)
            if out is not None:
                found.add(out)
    return frozenset(found)


def oracle_complexity(x: str, max_symbols: int, max_steps: int) -> Optional[int]:
    """Minimal bit size of a program of <= ``max_symbols`` symbols printing ``x`` within ``max_steps``; None if none."""
    for n in range(1, max_symbols + 1):
        if x in _naive_outputs(n, max_steps):
            return 3 * n
    return None
