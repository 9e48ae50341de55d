"""Exact dyadic bounds on the BitF halting probability.

Everything here is integer or :class:`fractions.Fraction` arithmetic.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

from .bitf import MACHINE_TAG
from .enumeration import HaltingDatabase, Status, count_valid

TAIL_TERMS = 64
MAX_CERTIFIED = 256


@total_ordering
@dataclass(frozen=True)
class Dyadic:
    """numerator / 2**scale, kept with an odd numerator (or zero at scale 0)."""

    numerator: int
    scale: int

    def __post_init__(self):
        n, k = self.numerator, self.scale
        if n < 0:
            raise ValueError("Dyadic values are non-negative")
        if n == 0:
            k = 0
        else:
            while k > 0 and n % 2 == 0:
                n //= 2
                k -= 1
            while k < 0:
                n *= 2
                k += 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "scale", k)

    @classmethod
    def pow2(cls, exponent: int) -> "Dyadic":
        """2**(-exponent)."""
        return cls(1, exponent)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, d.bit_length() - 1)

    @classmethod
    def ceil(cls, q: Fraction, scale: int) -> "Dyadic":
        """Smallest multiple of 2**-scale that is >= q."""
        return cls(-((-q.numerator * 2 ** scale) // q.denominator), scale)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 2 ** self.scale)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        k = max(self.scale, other.scale)
        return Dyadic((self.numerator << (k - self.scale)) + (other.numerator << (k - other.scale)), k)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        k = max(self.scale, other.scale)
        return Dyadic((self.numerator << (k - self.scale)) - (other.numerator << (k - other.scale)), k)

    def __lt__(self, other: "Dyadic") -> bool:
        return self.to_fraction() < other.to_fraction()

    def __str__(self) -> str:
        return f"{self.numerator}/{2 ** self.scale}"

    def binary(self, places: int = 32) -> str:
        """Binary expansion, truncated to ``places`` digits after the point."""
        whole, frac = divmod(self.numerator, 2 ** self.scale)
        digits = []
        for _ in range(places):
            frac *= 2
            bit, frac = divmod(frac, 2 ** self.scale)
            digits.append(str(bit))
        return f"{whole}." + "".join(digits)


ZERO = Dyadic(0, 0)


def _mass(records, status: Status) -> Dyadic:
    total = 0
    k = 0
    for r in records:
        if r.status is status:
            b = r.bit_length
            if b > k:
                total <<= b - k
                k = b
            total += 1 << (k - b)
    return Dyadic(total, k)


def total_mass(max_symbols: int) -> Dyadic:
    """Kraft sum of every valid program with at most ``max_symbols`` symbols."""
    k = 3 * max_symbols
    return Dyadic(sum(count_valid(n) << (k - 3 * n) for n in range(1, max_symbols + 1)), k)


def lower_bound(db: HaltingDatabase) -> Dyadic:
    return _mass(db.records.values(), Status.HALTED)


def diverged_mass(db: HaltingDatabase) -> Dyadic:
    return _mass(db.records.values(), Status.DIVERGED)


def undecided_mass(db: HaltingDatabase) -> Dyadic:
    """Weight of UNDECIDED records, plus any program of <= L symbols absent from ``db``."""
    recorded = (_mass(db.records.values(), Status.UNDECIDED) + lower_bound(db) + diverged_mass(db))
    missing = total_mass(db.max_symbols) - recorded
    return _mass(db.records.values(), Status.UNDECIDED) + missing


def unexplored_tail(max_symbols: int) -> Dyadic:
    """Dyadic over-estimate of the weight of all programs longer than ``max_symbols``.

    Sums 64 exact terms, bounds the rest by count_valid(n) <= 6**(n-1),
    i.e. (1/2)(3/4)**(L+64), then rounds up to a multiple of 2**(-4L).
    """
    L = max_symbols
    if L < 0:
        raise ValueError("max_symbols must be >= 0")
    s = sum(Fraction(count_valid(n), 8 ** n) for n in range(L + 1, L + TAIL_TERMS + 1))
    s += Fraction(1, 2) * Fraction(3, 4) ** (L + TAIL_TERMS)
    return Dyadic.ceil(s, 4 * L)


def certified_prefix(lower: Dyadic, upper: Dyadic, cap: int = MAX_CERTIFIED) -> str:
    """Longest b with [lower, upper] inside the half-open interval [0.b, 0.b + 2**-len(b))."""
    lo, hi = lower.to_fraction(), upper.to_fraction()
    if hi >= 1 or lo > hi:
        return ""
    bits = ""
    for k in range(1, cap + 1):
        a = (lo.numerator * 2 ** k) // lo.denominator
        if hi >= Fraction(a + 1, 2 ** k):
            break
        bits = format(a, f"0{k}b")
    return bits


@dataclass(frozen=True)
class OmegaBounds:
    lower: Dyadic
    upper: Dyadic
    undecided_mass: Dyadic
    tail_bound: Dyadic
    diverged_mass: Dyadic
    certified_bits: str
    max_symbols: int
    max_steps: int
    decided: int
    machine: str = MACHINE_TAG

    def contains(self, other: "OmegaBounds") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def report(self) -> str:
        zeros, ones, run = normality_stats(self.certified_bits)
        lines = [
            f"# Omega bounds for machine {self.machine} (halting probability)",
            "# N bits of Omega need N bits of information: the certified prefix only grows with",
            "# decided halting records. Illustration at desk scale; no asymptotic constant is claimed.",
            f"machine={self.machine}",
            f"L={self.max_symbols}",
            f"T={self.max_steps}",
            f"decided={self.decided}",
            f"lower={self.lower}",
            f"undecided_mass={self.undecided_mass}",
            f"tail_bound={self.tail_bound}",
            f"upper={self.upper}",
            f"lower_binary={self.lower.binary(32)}",
            f"upper_binary={self.upper.binary(32)}",
            f"certified_bits={self.certified_bits or '-'}",
            f"certified_count={len(self.certified_bits)}",
            f"normality zeros={zeros} ones={ones} max_run={run} (descriptive only)",
        ]
        return "\n".join(lines) + "\n"


def bounds(db: HaltingDatabase) -> OmegaBounds:
    lower = lower_bound(db)
    und = undecided_mass(db)
    tail = unexplored_tail(db.max_symbols)
    upper = lower + und + tail
    decided = sum(1 for r in db.records.values() if r.decided)
    return OmegaBounds(lower, upper, und, tail, diverged_mass(db), certified_prefix(lower, upper),
                       db.max_symbols, db.max_steps, decided)


@dataclass(frozen=True)
class InformationRow:
    max_symbols: int
    max_steps: int
    decided: int
    certified: int


def certified_bits_count_vs_information(dbs: Iterable[HaltingDatabase]) -> list[InformationRow]:
    rows = []
    for db in dbs:
        b = bounds(db)
        rows.append(InformationRow(db.max_symbols, db.max_steps, b.decided, len(b.certified_bits)))
    return rows


def information_csv(rows: Sequence[InformationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L", "T", "decided", "certified_bits"])
    for r in rows:
        w.writerow([r.max_symbols, r.max_steps, r.decided, r.certified])
    return buf.getvalue()


def normality_stats(bits: str) -> tuple[int, int, int]:
    """(zeros, ones, longest run of equal bits)."""
    zeros = bits.count("0")
    longest = run = 0
    prev = None
    for b in bits:
        run = run + 1 if b == prev else 1
        prev = b
        longest = max(longest, run)
    return zeros, len(bits) - zeros, longest
