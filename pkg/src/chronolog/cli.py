"""Command-line front end.

Subcommands:

    answer     parse -> validate -> normalize -> stratify -> run -> answer
    check      validate + recursion check only
    normalize  print the normal form of an ontology
    deps       print the predicate dependency graph in DOT
    ingest     turn measurement/metadata CSVs into a facts file

Exit codes: 0 consistent answer, 1 usage/parse error, 2 validation or
recursion error, 3 inconsistent knowledge base.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import engine, ingest, naive, parsing, strata
from .errors import (
    ChronologError,
    CyclicProgramError,
    NormalizationError,
    OracleSizeError,
    ParseError,
    ValidationError,
)
from .model import signature, validate
from .normalform import normalize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INCONSISTENT = 3


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_facts(paths: Sequence[str]):
    facts = []
    for path in paths:
        facts.extend(parsing.parse_data(_read(path)))
    return facts


def _validated(ontology, facts):
    report = validate(ontology, facts)
    if report:
        raise ValidationError(report)


def cmd_answer(args) -> int:
    ontology = parsing.parse_ontology(_read(args.ontology))
    facts = _load_facts(args.data)
    _validated(ontology, facts)
    arities, _ = signature(ontology, facts)
    query = parsing.parse_query(args.query, arities)

    program = normalize(ontology)
    threads = 1 if args.single_thread else None
    result = engine.run(program, facts, threads=threads)
    answers = engine.answer(query, result)

    if args.oracle:
        reference = naive.naive_answer(ontology, facts, query)
        if reference != answers:
            print("oracle mismatch:", file=sys.stderr)
            print(f"  engine: {answers}", file=sys.stderr)
            print(f"  oracle: {reference}", file=sys.stderr)
            return EXIT_USAGE
        print("oracle check: ok", file=sys.stderr)

    if args.stats:
        print("stratum\trules\trows\tintervals\tseconds", file=sys.stderr)
        for stat in result.stats:
            print(
                f"{stat.predicate}\t{stat.rules}\t{stat.rows}"
                f"\t{stat.intervals}\t{stat.seconds:.6f}",
                file=sys.stderr,
            )

    if args.format == "json":
        sys.stdout.write(engine.format_json(query, answers))
    else:
        if answers.status is engine.Status.INCONSISTENT:
            print("INCONSISTENT: the knowledge base entails falsum;")
            print("every tuple holds over (-inf,+inf).")
        sys.stdout.write(engine.format_tsv(query, answers))
    if answers.status is engine.Status.INCONSISTENT:
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_check(args) -> int:
    ontology = parsing.parse_ontology(_read(args.ontology))
    facts = _load_facts(args.data)
    _validated(ontology, facts)
    order = strata.check_nonrecursive(strata.build_graph(ontology))
    print(f"ok: {len(ontology.rules)} rules, {len(facts)} facts")
    print("evaluation order: " + ", ".join(order))
    return EXIT_OK


def cmd_normalize(args) -> int:
    ontology = parsing.parse_ontology(_read(args.ontology))
    _validated(ontology, [])
    program = normalize(ontology)
    sys.stdout.write(parsing.format_ontology(program.to_ontology()))
    if args.verbose and program.fresh:
        print("% fresh symbols:", file=sys.stderr)
        for name, origin in sorted(program.fresh.items()):
            print(f"%   {name}: {origin}", file=sys.stderr)
    return EXIT_OK


def cmd_deps(args) -> int:
    ontology = parsing.parse_ontology(_read(args.ontology))
    graph = strata.build_graph(ontology)
    sys.stdout.write(strata.to_dot(graph))
    return EXIT_OK


def cmd_ingest(args) -> int:
    config = ingest.parse_config(_read(args.config))
    report = ingest.IngestionReport()
    facts = []
    if args.weather:
        with open(args.weather, newline="", encoding="utf-8") as handle:
            facts.extend(ingest.ingest_weather_csv(handle, config, report))
    if args.metadata:
        with open(args.metadata, newline="", encoding="utf-8") as handle:
            facts.extend(ingest.ingest_metadata_csv(handle))
    text = parsing.format_facts(facts)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(
        f"ingested {report.rows} rows -> {len(facts)} facts"
        f" ({report.skipped} rows skipped)",
        file=sys.stderr,
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronolog",
        description="Metric-temporal rule reasoning over timestamped logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    answer = sub.add_parser("answer", help="answer a query over ontology + data")
    answer.add_argument("ontology", help="ontology file (.dmtl)")
    answer.add_argument(
        "-d", "--data", action="append", default=[], help="facts file (.dfacts)"
    )
    answer.add_argument("-q", "--query", required=True, help="query, e.g. 'P(x) @ q'")
    answer.add_argument("--format", choices=("text", "json"), default="text")
    answer.add_argument(
        "--single-thread", action="store_true", help="disable the stratum thread pool"
    )
    answer.add_argument(
        "--stats", action="store_true", help="print per-stratum timings to stderr"
    )
    answer.add_argument(
        "--oracle",
        action="store_true",
        help=argparse.SUPPRESS,  # cross-check small inputs with the naive evaluator
    )
    answer.set_defaults(func=cmd_answer)

    check = sub.add_parser("check", help="validate an ontology (+ optional data)")
    check.add_argument("ontology")
    check.add_argument("-d", "--data", action="append", default=[])
    check.set_defaults(func=cmd_check)

    norm = sub.add_parser("normalize", help="print the normal form")
    norm.add_argument("ontology")
    norm.add_argument("-v", "--verbose", action="store_true")
    norm.set_defaults(func=cmd_normalize)

    deps = sub.add_parser("deps", help="print the dependency graph in DOT")
    deps.add_argument("ontology")
    deps.set_defaults(func=cmd_deps)

    ing = sub.add_parser("ingest", help="turn CSV logs into a facts file")
    ing.add_argument("--config", required=True, help="ingestion config file")
    ing.add_argument("--weather", help="measurement CSV")
    ing.add_argument("--metadata", help="metadata CSV (ID, COUNTY columns)")
    ing.add_argument("-o", "--out", help="output facts file (default: stdout)")
    ing.set_defaults(func=cmd_ingest)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print("validation failed:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation}", file=sys.stderr)
        return EXIT_INVALID
    except CyclicProgramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NormalizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
