"""``aitlab`` command line: batch experiments with persisted, byte-stable outputs.

Exit codes: 0 success, 1 usage, 2 I/O or bad input file, 3 refutation found,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import complexity as cx
from . import enumeration as en
from . import lisp
from . import metamath as mm
from . import omega as om

EXIT_USAGE, EXIT_IO, EXIT_REFUTED, EXIT_BUG = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _db_path(args) -> str:
    path = args.db or os.environ.get("AITLAB_DB")
    if not path:
        raise UsageError("no database given (use --db or set AITLAB_DB)")
    return path


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="ascii")
        except OSError as exc:
            raise en.StorageFailure(str(exc)) from exc
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    db = en.dovetail(args.max_symbols, args.max_steps, partitions=args.jobs, jobs=args.jobs,
                     detect_cycles=not args.no_cycle_detection)
    en.save(db, _db_path(args))
    c = db.counts()
    print(f"records={len(db)} halted={c[en.Status.HALTED]} diverged={c[en.Status.DIVERGED]} "
          f"undecided={c[en.Status.UNDECIDED]} L={db.max_symbols} T={db.max_steps}")
    return 0


def _rows_jsonl(rows) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def cmd_complexity(args) -> int:
    table = cx.build_table(en.load(_db_path(args)))
    if args.format == "csv":
        text = table.to_csv()
    elif args.format == "jsonl":
        text = _rows_jsonl({"output": e.output, "c_bits": e.c_bits, "exact": e.exact,
                            "witnesses": [str(en.decode_bits(w)) for w in e.witnesses]}
                           for e in table.rows())
    else:
        lines = [f"# program-size complexity, L={table.max_symbols} T={table.max_steps}"]
        for e in table.rows():
            lines.append(f"C({e.output or '<empty>'}) = {e.c_bits} bits "
                         f"{'exact' if e.exact else 'upper-bound'} "
                         f"witness={e.first_witness} count={len(e.witnesses)}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_elegant(args) -> int:
    records = cx.elegant(en.load(_db_path(args)))
    if args.format == "jsonl":
        text = _rows_jsonl({"program": str(r.program), "bits": en.encode_bits(r.program),
                            "output": r.output, "certified": r.certified} for r in records)
    elif args.format == "csv":
        text = "program,bits,output,certified\n" + "".join(
            f"{r.program},{en.encode_bits(r.program)},{r.output},{str(r.certified).lower()}\n"
            for r in records)
    else:
        lines = ["# elegant programs: no smaller program has the same output"]
        lines += [f"{r.program}\toutput={r.output or '-'}\t{'certified' if r.certified else 'uncertified'}"
                  for r in records]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_irreducibility(args) -> int:
    table = cx.build_table(en.load(_db_path(args)))
    try:
        rep = cx.irreducibility_constant(table)
    except cx.InsufficientCoverage as exc:
        print(f"insufficient coverage: {exc}", file=sys.stderr)
        return EXIT_IO
    lines = ["# elegant programs viewed as outputs: slack = |p| - C(bits of p)",
             f"c_emp={rep.c_emp}", f"max_slack={rep.max_slack}"]
    lines += [f"program={r.program} bits={r.encoding} size={r.size_bits} "
              f"C={r.encoding_complexity} slack={r.slack}" for r in rep.rows]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_omega(args) -> int:
    paths = args.db or ([os.environ["AITLAB_DB"]] if os.environ.get("AITLAB_DB") else None)
    if not paths:
        raise UsageError("no database given (use --db or set AITLAB_DB)")
    dbs = [en.load(p) for p in paths]
    if args.format == "csv":
        text = om.information_csv(om.certified_bits_count_vs_information(dbs))
    else:
        text = "\n".join(om.bounds(db).report() for db in dbs)
    _emit(text, args.out)
    return 0


def cmd_lisp_run(args) -> int:
    try:
        source = Path(args.file).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        outcome = lisp.Interpreter().load(source, args.budget)
    except lisp.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(outcome.render())
    return 0


def _load_theory(path: str) -> mm.TheoryFixture:
    try:
        return mm.TheoryFixture.load(path)
    except (OSError, UnicodeDecodeError) as exc:
        raise en.StorageFailure(str(exc)) from exc


def cmd_prove(args) -> int:
    report = mm.hauptsatz_check(_load_theory(args.theory), args.budget)
    _emit(report.text(), args.out)
    return 0


def cmd_refute(args) -> int:
    report = mm.hauptsatz_check(_load_theory(args.theory), args.budget)
    _emit(report.text(), args.out)
    return EXIT_REFUTED if report.outcome is mm.Outcome.REFUTED else 0


def cmd_oracle(args) -> int:
    rows = mm.bounded_elegance_oracle(args.max_chars, budget=args.budget)
    lines = ["# certified elegance facts grow with expression size",
             "max_chars,certified_elegant"]
    lines += [f"{k},{n}" for k, n in mm.elegance_growth(rows, args.max_chars)]
    if args.list:
        lines.append("# size,expression,value")
        lines += [f"{r.size},{lisp.print_canonical(r.expression)},{lisp.print_canonical(r.value)}"
                  for r in rows if r.elegant]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aitlab", description="Algorithmic information theory desk laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enumerate", help="run every BitF program up to a size",
                       description="Program -> computer -> output, exhaustively: runs every valid "
                                   "BitF program of up to --max-symbols symbols for --max-steps "
                                   "steps and writes the halting database.")
    s.add_argument("--max-symbols", type=_positive, required=True)
    s.add_argument("--max-steps", type=_positive, required=True)
    s.add_argument("--jobs", type=_positive, default=1)
    s.add_argument("--db")
    s.add_argument("--no-cycle-detection", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    for name, func, fmt, desc in [
        ("complexity", cmd_complexity, "csv",
         "Program-size complexity: the size in bits of the smallest program for each output."),
        ("elegant", cmd_elegant, "text",
         "Elegant programs: no smaller program in the same language produces the same output. "
         "The best theory for a fixed set of data is an elegant program."),
    ]:
        s = sub.add_parser(name, help=desc.split(":")[0], description=desc)
        s.add_argument("--db")
        s.add_argument("--out")
        s.add_argument("--format", choices=["csv", "text", "jsonl"], default=fmt)
        s.set_defaults(func=func)

    s = sub.add_parser("irreducibility", help="measure the irreducibility constant",
                       description="An elegant program viewed as an output is computationally "
                                   "irreducible: reports |p| - C(encoding of p) per covered program.")
    s.add_argument("--db")
    s.add_argument("--out")
    s.set_defaults(func=cmd_irreducibility)

    s = sub.add_parser("omega", help="bound the halting probability",
                       description="Halting probability Omega: exact dyadic bounds and certified bits. "
                                   "N bits of Omega need N bits of information. Pass several --db "
                                   "with --format csv for the information-vs-bits table.")
    s.add_argument("--db", action="append")
    s.add_argument("--out")
    s.add_argument("--format", choices=["text", "csv"], default="text")
    s.set_defaults(func=cmd_omega)

    s = sub.add_parser("lisp", help="TinyLISP tools",
                       description="The TinyLISP metalanguage, with program size measured in characters.")
    lsub = s.add_subparsers(dest="lisp_command", required=True, parser_class=_Parser)
    r = lsub.add_parser("run", help="evaluate a source file",
                        description="Evaluate a TinyLISP file; prints the canonical value or fail.")
    r.add_argument("file")
    r.add_argument("--budget", type=_positive, required=True)
    r.set_defaults(func=cmd_lisp_run)

    for name, func, desc in [
        ("prove", cmd_prove,
         "A theory is a program that generates theorems: list its elegance claims and check "
         "them against the bound theory size + refuter size."),
        ("refute", cmd_refute,
         "You cannot prove a program elegant if it is substantially larger than the theory: run "
         "the Berry refuter; exit 3 with a verified witness if the theory overreaches."),
    ]:
        s = sub.add_parser(name, help=desc.split(":")[0], description=desc)
        s.add_argument("--theory", required=True)
        s.add_argument("--budget", type=_positive, required=True)
        s.add_argument("--out")
        s.set_defaults(func=func)

    s = sub.add_parser("oracle", help="bounded elegance oracle",
                       description="Exhaustive elegance facts over a small TinyLISP vocabulary; their "
                                   "count keeps growing with size (the mathematical universe has "
                                   "infinite complexity).")
    s.add_argument("--max-chars", type=_positive, default=mm.ORACLE_CAP)
    s.add_argument("--budget", type=_positive, default=1000)
    s.add_argument("--list", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"aitlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (mm.CapExceeded,) as exc:
        print(f"aitlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (en.VerdictConflict, mm.RefuterEvalError, AssertionError) as exc:
        print(f"aitlab: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_BUG
    except (en.DatabaseError, lisp.ParseError, mm.MetamathError) as exc:
        print(f"aitlab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
