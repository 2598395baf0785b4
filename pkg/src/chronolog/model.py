"""Abstract syntax and static validation for rule programs, facts, and queries.

All nodes are immutable; an ontology is safe to share between threads once
built.  Validation is report-style: it returns the list of violations instead
of raising, so callers can show every problem at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Union

from .intervals import Interval, Window


@dataclass(frozen=True, slots=True)
class Variable:
    name: str


@dataclass(frozen=True, slots=True)
class Constant:
    name: str


Term = Union[Variable, Constant]


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)


@dataclass(frozen=True, slots=True)
class Comparison:
    left: Term
    negated: bool  # True for !=, False for =
    right: Term

    @property
    def op(self) -> str:
        return "!=" if self.negated else "="


class TemporalOp(Enum):
    BOX_FUTURE = "boxplus"
    BOX_PAST = "boxminus"
    DIAMOND_FUTURE = "diamondplus"
    DIAMOND_PAST = "diamondminus"

    @property
    def is_box(self) -> bool:
        return self in (TemporalOp.BOX_FUTURE, TemporalOp.BOX_PAST)

    @property
    def is_future(self) -> bool:
        return self in (TemporalOp.BOX_FUTURE, TemporalOp.DIAMOND_FUTURE)


@dataclass(frozen=True, slots=True)
class Modal:
    op: TemporalOp
    window: Window
    body: "Literal"


Literal = Union[Atom, Comparison, Modal]

# A rule head is an atom, a (possibly nested) box over an atom, or falsum.
HeadLiteral = Optional[Union[Atom, Modal]]


@dataclass(frozen=True, slots=True)
class Rule:
    head: HeadLiteral  # None encodes a falsum head
    body: tuple[Literal, ...]

    @property
    def is_falsum(self) -> bool:
        return self.head is None


@dataclass(frozen=True, slots=True)
class Ontology:
    rules: tuple[Rule, ...] = ()


@dataclass(frozen=True, slots=True)
class Fact:
    atom: Atom
    interval: Interval

    def __post_init__(self):
        if not self.atom.is_ground():
            raise ValueError(f"fact atom must be ground: {self.atom.predicate}")
        if self.interval.is_empty():
            raise ValueError(f"fact interval is empty: {self.interval}")


@dataclass(frozen=True, slots=True)
class Query:
    atom: Atom
    interval_variable: str


# ---------------------------------------------------------------------------
# Traversal helpers


def literal_atoms(literal: Literal) -> Iterator[Atom]:
    if isinstance(literal, Atom):
        yield literal
    elif isinstance(literal, Modal):
        yield from literal_atoms(literal.body)


def literal_windows(literal: Literal) -> Iterator[Window]:
    if isinstance(literal, Modal):
        yield literal.window
        yield from literal_windows(literal.body)


def term_vars(terms: Iterable[Term]) -> set[str]:
    return {t.name for t in terms if isinstance(t, Variable)}


def literal_vars(literal: Literal) -> set[str]:
    if isinstance(literal, Atom):
        return term_vars(literal.args)
    if isinstance(literal, Comparison):
        return term_vars((literal.left, literal.right))
    return literal_vars(literal.body)


def head_atom(rule: Rule) -> Optional[Atom]:
    lit = rule.head
    while isinstance(lit, Modal):
        lit = lit.body
    return lit if isinstance(lit, Atom) else None


def head_predicate(rule: Rule) -> Optional[str]:
    atom = head_atom(rule)
    return atom.predicate if atom is not None else None


def rule_windows(rule: Rule) -> Iterator[Window]:
    if rule.head is not None:
        yield from literal_windows(rule.head)
    for lit in rule.body:
        yield from literal_windows(lit)


def rule_atoms(rule: Rule) -> Iterator[Atom]:
    atom = head_atom(rule)
    if atom is not None:
        yield atom
    for lit in rule.body:
        yield from literal_atoms(lit)


def ontology_constants(ontology: Ontology) -> set[str]:
    out: set[str] = set()
    for rule in ontology.rules:
        for atom in rule_atoms(rule):
            out.update(t.name for t in atom.args if isinstance(t, Constant))
        for lit in rule.body:
            if isinstance(lit, Comparison):
                for t in (lit.left, lit.right):
                    if isinstance(t, Constant):
                        out.add(t.name)
    return out


def individuals(facts: Iterable[Fact]) -> tuple[str, ...]:
    """Sorted constants occurring in the data."""
    names = {t.name for f in facts for t in f.atom.args}
    return tuple(sorted(names))


# ---------------------------------------------------------------------------
# Validation

HEAD_COMPARISON = "head-comparison"
UNSAFE_VARIABLE = "unsafe-variable"
ARITY_CLASH = "arity-clash"
INCONSISTENT_WINDOW = "inconsistent-window"
NO_BODY_ATOM = "no-body-atom"


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str
    message: str
    rule_index: Optional[int] = None

    def __str__(self) -> str:
        where = f" (rule {self.rule_index})" if self.rule_index is not None else ""
        return f"{self.kind}{where}: {self.message}"


def _head_comparison(literal: HeadLiteral) -> bool:
    lit = literal
    while isinstance(lit, Modal):
        lit = lit.body
    return isinstance(lit, Comparison)


def signature(
    ontology: Ontology, facts: Iterable[Fact] = (), query: Optional[Query] = None
) -> tuple[dict[str, int], list[str]]:
    """Predicate arities plus a list of clash messages."""
    arities: dict[str, int] = {}
    clashes: list[str] = []

    def see(atom: Atom, where: str):
        known = arities.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            clashes.append(
                f"{atom.predicate} used with arity {atom.arity} in {where}, "
                f"previously {known}"
            )

    for idx, rule in enumerate(ontology.rules):
        for atom in rule_atoms(rule):
            see(atom, f"rule {idx}")
        # Comparisons in heads have no atom; rule_atoms skips them.
    for fact in facts:
        see(fact.atom, "data")
    if query is not None:
        see(query.atom, "query")
    return arities, clashes


def validate(ontology: Ontology, facts: Iterable[Fact] = ()) -> list[Violation]:
    """Static checks: head comparisons, safety, arity consistency, windows.

    An empty report means the program is ready for normalization.  Rules whose
    body contains no relational atom are flagged as unsafe: nothing can bind a
    range for them.
    """
    out: list[Violation] = []
    facts = list(facts)

    _, clashes = signature(ontology, facts)
    for msg in clashes:
        out.append(Violation(ARITY_CLASH, msg))

    for idx, rule in enumerate(ontology.rules):
        if rule.head is not None and _head_comparison(rule.head):
            out.append(
                Violation(HEAD_COMPARISON, "comparison literal in rule head", idx)
            )

        body_atom_vars: set[str] = set()
        body_has_atom = False
        for lit in rule.body:
            for atom in literal_atoms(lit):
                body_has_atom = True
                body_atom_vars |= term_vars(atom.args)
        if not body_has_atom:
            out.append(
                Violation(NO_BODY_ATOM, "rule body contains no relational atom", idx)
            )

        need: set[str] = set()
        if rule.head is not None:
            need |= literal_vars(rule.head)
        for lit in rule.body:
            if isinstance(lit, Comparison):
                need |= literal_vars(lit)
        for name in sorted(need - body_atom_vars):
            out.append(
                Violation(
                    UNSAFE_VARIABLE,
                    f"variable {name} does not occur in any body atom",
                    idx,
                )
            )

        for window in rule_windows(rule):
            if not window.is_consistent:
                out.append(
                    Violation(
                        INCONSISTENT_WINDOW,
                        f"operator window {window} admits no distance",
                        idx,
                    )
                )
    return out


def classify_predicates(
    ontology: Ontology, facts: Iterable[Fact] = ()
) -> tuple[frozenset[str], frozenset[str]]:
    """(extensional, intensional) predicate names; the sets may overlap."""
    extensional = frozenset(f.atom.predicate for f in facts)
    intensional = frozenset(
        p for p in (head_predicate(r) for r in ontology.rules) if p is not None
    )
    return extensional, intensional
