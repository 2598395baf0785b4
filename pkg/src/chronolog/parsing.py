"""Concrete text syntax for ontologies, data instances, and queries.

Grammar sketch (documented in full in the README):

    rule      :=  head "<-" literal ("," literal)* "."
    head      :=  "false" | literal
    literal   :=  OP window literal | atom | comparison
    OP        :=  "boxplus" | "boxminus" | "diamondplus" | "diamondminus"
    window    :=  ("[" | "(") duration "," duration ("]" | ")")
    atom      :=  PREDICATE [ "(" term ("," term)* ")" ]
    comparison:=  term ("=" | "!=") term   -- parentheses optional
    fact      :=  atom "@" interval "."
    query     :=  atom "@" NAME

Lexical conventions: predicate names start with an uppercase letter or "_";
a lowercase single letter (optionally followed by digits/underscores) is a
variable, as is any "?name"; other lowercase identifiers are constants.  In
data files every argument is a constant.  Window brackets encode comparison
strictness: "[" / "]" are inclusive, "(" / ")" strict.  "%" starts a line
comment.  Time points are rational seconds, "p/q" fractions, ISO-8601 UTC
instants, or "-inf"/"+inf"; durations take the suffixes ms, s, min, h, d.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ParseError
from .intervals import (
    NEG_INF,
    POS_INF,
    Interval,
    TimePoint,
    Window,
)
from .model import (
    Atom,
    Comparison,
    Constant,
    Fact,
    Literal,
    Modal,
    Ontology,
    Query,
    Rule,
    TemporalOp,
    Term,
    Variable,
)

_OPERATORS = {op.value: op for op in TemporalOp}
_KEYWORDS = set(_OPERATORS) | {"false"}

_UNIT_SECONDS = {
    "ms": Fraction(1, 1000),
    "s": Fraction(1),
    "min": Fraction(60),
    "h": Fraction(3600),
    "d": Fraction(86400),
}

_VARIABLE_RE = re.compile(r"[a-z][0-9_]*\Z")

_ISO_RE = re.compile(
    r"(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2})"
    r"(?::(\d{2})(?:\.(\d+))?)?"
    r"(Z|[+-]\d{2}:\d{2})?\Z"
)

_NUMBER_RE = re.compile(r"[+-]?\d+(?:\.\d+|/\d+)?(?:ms|min|s|h|d)?\Z")

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>[^\S\n]+)
    | (?P<COMMENT>%[^\n]*)
    | (?P<NL>\n)
    | (?P<ISO>\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:\d{2})?)
    | (?P<NUMBER>[+-]?\d+(?:\.\d+|/\d+)?(?:ms|min|s|h|d)?(?![A-Za-z0-9_]))
    | (?P<INF>[+-]inf(?![A-Za-z0-9_]))
    | (?P<ARROW><-)
    | (?P<NEQ>!=)
    | (?P<QVAR>\?[A-Za-z_][A-Za-z0-9_]*)
    | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<SYM>[()\[\],.@=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class SourcePosition:
    line: int
    column: int


@dataclass(frozen=True, slots=True)
class Token:
    type: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = match.lastgroup
        value = match.group()
        if kind == "NL":
            line += 1
            col = 1
        else:
            if kind not in ("WS", "COMMENT"):
                if kind == "SYM":
                    kind = value
                tokens.append(Token(kind, value, line, col))
            col += len(value)
        pos = match.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


def _parse_number(text: str, line: int = 1, col: int = 1) -> Fraction:
    """Exact rational from a decimal, 'p/q', or unit-suffixed duration."""
    if not _NUMBER_RE.match(text):
        raise ParseError(f"malformed number {text!r}", line, col)
    unit = Fraction(1)
    for suffix in ("ms", "min", "s", "h", "d"):
        if text.endswith(suffix):
            unit = _UNIT_SECONDS[suffix]
            text = text[: -len(suffix)]
            break
    try:
        if "/" in text:
            num, den = text.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed number: {exc}", line, col) from None
    return value * unit


_EPOCH_ORDINAL = date(1970, 1, 1).toordinal()


def _parse_iso(text: str, line: int = 1, col: int = 1) -> Fraction:
    match = _ISO_RE.match(text)
    if match is None:
        raise ParseError(f"malformed timestamp {text!r}", line, col)
    year, month, day, hour, minute = (int(match.group(i)) for i in range(1, 6))
    second = int(match.group(6) or 0)
    frac_digits = match.group(7)
    offset_text = match.group(8)
    try:
        days = date(year, month, day).toordinal() - _EPOCH_ORDINAL
    except ValueError as exc:
        raise ParseError(f"invalid date: {exc}", line, col) from None
    if hour > 23 or minute > 59 or second > 59:
        raise ParseError(f"invalid time of day in {text!r}", line, col)
    value = Fraction(days * 86400 + hour * 3600 + minute * 60 + second)
    if frac_digits:
        value += Fraction(int(frac_digits), 10 ** len(frac_digits))
    if offset_text and offset_text != "Z":
        sign = 1 if offset_text[0] == "+" else -1
        oh, om = int(offset_text[1:3]), int(offset_text[4:6])
        value -= sign * (oh * 3600 + om * 60)
    return value


def parse_timepoint(text: str) -> TimePoint:
    """Parse a single time point literal: seconds, fraction, ISO instant, or inf."""
    stripped = text.strip()
    if stripped == "-inf":
        return NEG_INF
    if stripped == "+inf":
        return POS_INF
    if _ISO_RE.match(stripped):
        return TimePoint.finite(_parse_iso(stripped))
    return TimePoint.finite(_parse_number(stripped))


def parse_duration(text: str) -> Fraction:
    """Parse a duration literal (seconds by default, exact unit conversion)."""
    return _parse_number(text.strip())


class _Parser:
    def __init__(self, text: str, mode: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.mode = mode  # "rule" | "data" | "query"

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def expect(self, type_: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.type != type_:
            expected = what or f"'{type_}'"
            raise ParseError(
                f"expected {expected}, found {tok.text!r}", tok.line, tok.column
            )
        return self.next()

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    def at_eof(self) -> bool:
        return self.peek().type == "EOF"

    # -- shared pieces -----------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.type == "QVAR":
            self.next()
            if self.mode == "data":
                raise ParseError(
                    "non-ground atom: variables are not allowed in data",
                    tok.line,
                    tok.column,
                )
            return Variable(tok.text[1:])
        if tok.type == "IDENT":
            self.next()
            name = tok.text
            if name in _KEYWORDS:
                raise ParseError(
                    f"reserved word {name!r} cannot be a term", tok.line, tok.column
                )
            if name[0].isupper() or name[0] == "_":
                raise ParseError(
                    f"constants are lowercase; {name!r} looks like a predicate",
                    tok.line,
                    tok.column,
                )
            if self.mode != "data" and _VARIABLE_RE.match(name):
                return Variable(name)
            return Constant(name)
        raise self.fail("expected a term")

    def atom(self) -> Atom:
        tok = self.expect("IDENT", "a predicate name")
        name = tok.text
        if name in _KEYWORDS:
            raise ParseError(
                f"reserved word {name!r} cannot be a predicate", tok.line, tok.column
            )
        if not (name[0].isupper() or name[0] == "_"):
            raise ParseError(
                f"predicate names start uppercase: {name!r}", tok.line, tok.column
            )
        args: list[Term] = []
        if self.peek().type == "(":
            self.next()
            args.append(self.term())
            while self.peek().type == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
        return Atom(name, tuple(args))

    def window(self) -> Window:
        open_tok = self.peek()
        if open_tok.type not in ("[", "("):
            raise self.fail("expected a window after the temporal operator")
        self.next()
        lo_inclusive = open_tok.type == "["
        lo = self.duration()
        self.expect(",")
        hi = self.duration()
        close_tok = self.peek()
        if close_tok.type not in ("]", ")"):
            raise self.fail("expected ']' or ')' to close the window")
        self.next()
        hi_inclusive = close_tok.type == "]"
        window = Window(lo, lo_inclusive, hi, hi_inclusive)
        if not window.is_consistent:
            raise ParseError(
                f"empty temporal window {window}", open_tok.line, open_tok.column
            )
        return window

    def duration(self) -> Fraction:
        tok = self.peek()
        if tok.type != "NUMBER":
            raise self.fail("expected a duration")
        self.next()
        return _parse_number(tok.text, tok.line, tok.column)

    def comparison_tail(self, left: Term) -> Comparison:
        tok = self.peek()
        if tok.type == "=":
            self.next()
            return Comparison(left, False, self.term())
        if tok.type == "NEQ":
            self.next()
            return Comparison(left, True, self.term())
        raise self.fail("expected '=' or '!=' in comparison")

    def literal(self) -> Literal:
        tok = self.peek()
        if tok.type == "IDENT" and tok.text in _OPERATORS:
            self.next()
            op = _OPERATORS[tok.text]
            window = self.window()
            return Modal(op, window, self.literal())
        if tok.type == "(":
            self.next()
            cmp_ = self.comparison_tail(self.term())
            self.expect(")")
            return cmp_
        if tok.type in ("QVAR",) or (
            tok.type == "IDENT"
            and tok.text not in _KEYWORDS
            and not (tok.text[0].isupper() or tok.text[0] == "_")
        ):
            return self.comparison_tail(self.term())
        atom = self.atom()
        return atom

    def endpoint(self) -> TimePoint:
        tok = self.peek()
        if tok.type == "INF":
            self.next()
            return NEG_INF if tok.text[0] == "-" else POS_INF
        if tok.type == "ISO":
            self.next()
            return TimePoint.finite(_parse_iso(tok.text, tok.line, tok.column))
        if tok.type == "NUMBER":
            self.next()
            return TimePoint.finite(_parse_number(tok.text, tok.line, tok.column))
        raise self.fail("expected an interval endpoint")

    def interval(self) -> Interval:
        open_tok = self.peek()
        if open_tok.type not in ("[", "("):
            raise self.fail("expected an interval")
        self.next()
        lo = self.endpoint()
        self.expect(",")
        hi = self.endpoint()
        close_tok = self.peek()
        if close_tok.type not in ("]", ")"):
            raise self.fail("expected ']' or ')' to close the interval")
        self.next()
        return Interval(lo, open_tok.type == "[", hi, close_tok.type == "]")

    # -- entry points --------------------------------------------------------

    def rule(self) -> Rule:
        tok = self.peek()
        if tok.type == "IDENT" and tok.text == "false":
            self.next()
            head: Optional[Literal] = None
        else:
            head = self.literal()
        self.expect("ARROW", "'<-'")
        body = [self.literal()]
        while self.peek().type == ",":
            self.next()
            body.append(self.literal())
        self.expect(".", "'.' at the end of the rule")
        return Rule(head, tuple(body))

    def fact(self) -> Fact:
        atom = self.atom()
        at = self.peek()
        self.expect("@", "'@' between atom and interval")
        interval = self.interval()
        self.expect(".", "'.' at the end of the fact")
        if interval.is_empty():
            raise ParseError(f"empty interval {interval}", at.line, at.column)
        try:
            return Fact(atom, interval)
        except ValueError as exc:
            raise ParseError(str(exc), at.line, at.column) from None

    def query(self) -> Query:
        atom = self.atom()
        self.expect("@", "'@' between atom and interval variable")
        var = self.expect("IDENT", "an interval variable name")
        if self.peek().type == ".":
            self.next()
        if not self.at_eof():
            raise self.fail("unexpected trailing input after query")
        return Query(atom, var.text)


def parse_ontology(text: str) -> Ontology:
    parser = _Parser(text, "rule")
    rules: list[Rule] = []
    while not parser.at_eof():
        rules.append(parser.rule())
    return Ontology(tuple(rules))


def parse_data(text: str) -> list[Fact]:
    parser = _Parser(text, "data")
    facts: list[Fact] = []
    while not parser.at_eof():
        facts.append(parser.fact())
    return facts


def parse_query(text: str, arities: Optional[Mapping[str, int]] = None) -> Query:
    parser = _Parser(text, "query")
    query = parser.query()
    if arities is not None:
        declared = arities.get(query.atom.predicate)
        if declared is not None and declared != query.atom.arity:
            raise ParseError(
                f"{query.atom.predicate} has arity {declared}, "
                f"query uses {query.atom.arity}"
            )
    return query


def parse_interval(text: str) -> Interval:
    parser = _Parser(text, "data")
    interval = parser.interval()
    if not parser.at_eof():
        raise parser.fail("unexpected trailing input after interval")
    return interval


# ---------------------------------------------------------------------------
# Printing (canonical text; parse(format(x)) == x)


def format_timepoint(tp: TimePoint) -> str:
    return str(tp)


def format_interval(interval: Interval) -> str:
    return str(interval)


def format_window(window: Window) -> str:
    return str(window)


def format_term(term: Term) -> str:
    if isinstance(term, Variable):
        return term.name if _VARIABLE_RE.match(term.name) else f"?{term.name}"
    return term.name


def format_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({', '.join(format_term(t) for t in atom.args)})"


def format_literal(literal: Literal) -> str:
    if isinstance(literal, Atom):
        return format_atom(literal)
    if isinstance(literal, Comparison):
        return f"{format_term(literal.left)} {literal.op} {format_term(literal.right)}"
    return f"{literal.op.value}{format_window(literal.window)} {format_literal(literal.body)}"


def format_rule(rule: Rule) -> str:
    head = "false" if rule.head is None else format_literal(rule.head)
    body = ", ".join(format_literal(lit) for lit in rule.body)
    return f"{head} <- {body}."


def format_ontology(ontology: Ontology) -> str:
    return "\n".join(format_rule(r) for r in ontology.rules) + (
        "\n" if ontology.rules else ""
    )


def format_fact(fact: Fact) -> str:
    return f"{format_atom(fact.atom)} @ {format_interval(fact.interval)}."


def format_facts(facts: Iterable[Fact]) -> str:
    lines = [format_fact(f) for f in facts]
    return "\n".join(lines) + ("\n" if lines else "")


def format_query(query: Query) -> str:
    return f"{format_atom(query.atom)} @ {query.interval_variable}"
