"""Rewriting arbitrary box-headed programs into the evaluator's normal form.

The normal form admits six rule shapes, all over plain atoms:

    JOIN        P <- Q, R            (with optional =/!= filters)
    FALSUM_JOIN false <- Q, R
    BOX_HEAD    box[w] P <- Q        (future or past)
    BOX_BODY    P <- box[w] Q        (future or past)
    COPY        P <- Q
    FALSUM_COPY false <- Q

Diamonds in bodies and nested modalities are eliminated with fresh predicates
from the reserved "_aux" namespace; the rewriting is a conservative extension:
certain answers over the original predicates are unchanged.  Diamonds in rule
heads are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import NormalizationError
from .intervals import Window
from .model import (
    Atom,
    Comparison,
    Constant,
    Literal,
    Modal,
    Ontology,
    Rule,
    TemporalOp,
    Variable,
    literal_vars,
)
from .parsing import format_literal, format_rule


@dataclass(frozen=True, slots=True)
class JoinRule:
    head: Optional[Atom]  # None encodes a falsum head
    left: Atom
    right: Atom
    filters: tuple[Comparison, ...] = ()


@dataclass(frozen=True, slots=True)
class CopyRule:
    head: Optional[Atom]
    body: Atom


@dataclass(frozen=True, slots=True)
class BoxHeadRule:
    future: bool
    window: Window
    head: Atom
    body: Atom


@dataclass(frozen=True, slots=True)
class BoxBodyRule:
    future: bool
    window: Window
    head: Atom
    body: Atom


NormalRule = Union[JoinRule, CopyRule, BoxHeadRule, BoxBodyRule]

AUX_PREFIX = "_aux"


def normal_head_predicate(rule: NormalRule) -> Optional[str]:
    head = rule.head
    return None if head is None else head.predicate


def normal_body_predicates(rule: NormalRule) -> tuple[str, ...]:
    if isinstance(rule, JoinRule):
        return (rule.left.predicate, rule.right.predicate)
    return (rule.body.predicate,)


def as_rule(rule: NormalRule) -> Rule:
    """View a normal rule as a general rule (for printing and the oracle)."""
    if isinstance(rule, JoinRule):
        body: tuple[Literal, ...] = (rule.left, rule.right) + rule.filters
        return Rule(rule.head, body)
    if isinstance(rule, CopyRule):
        return Rule(rule.head, (rule.body,))
    op_box = TemporalOp.BOX_FUTURE if rule.future else TemporalOp.BOX_PAST
    if isinstance(rule, BoxHeadRule):
        return Rule(Modal(op_box, rule.window, rule.head), (rule.body,))
    return Rule(rule.head, (Modal(op_box, rule.window, rule.body),))


@dataclass(frozen=True)
class NormalizedOntology:
    rules: tuple[NormalRule, ...]
    fresh: dict[str, str] = field(default_factory=dict)

    def to_ontology(self) -> Ontology:
        return Ontology(tuple(as_rule(r) for r in self.rules))


def strip_modal_comparisons(rule: Rule) -> Rule:
    """Drop temporal operators wrapped around comparisons (time-independent)."""

    def strip(lit: Literal) -> Literal:
        if isinstance(lit, Modal):
            inner = strip(lit.body)
            if isinstance(inner, Comparison):
                return inner
            return Modal(lit.op, lit.window, inner)
        return lit

    head = rule.head if rule.head is None else strip(rule.head)
    return Rule(head, tuple(strip(lit) for lit in rule.body))


def is_normal(ontology_or_rules) -> bool:
    rules = getattr(ontology_or_rules, "rules", ontology_or_rules)
    return all(
        isinstance(r, (JoinRule, CopyRule, BoxHeadRule, BoxBodyRule)) for r in rules
    )


class _Normalizer:
    def __init__(self):
        self.out: list[NormalRule] = []
        self.fresh: dict[str, str] = {}
        self.counter = 0

    def fresh_atom(self, variables: Iterable[str], origin: str) -> Atom:
        self.counter += 1
        name = f"{AUX_PREFIX}{self.counter}"
        self.fresh[name] = origin
        args = tuple(Variable(v) for v in sorted(set(variables)))
        return Atom(name, args)

    def run(self, ontology: Ontology) -> NormalizedOntology:
        queue: list[Rule] = list(ontology.rules)
        while queue:
            self.rewrite(strip_modal_comparisons(queue.pop(0)), queue)
        return NormalizedOntology(tuple(self.out), self.fresh)

    # -- one rule ----------------------------------------------------------

    def rewrite(self, rule: Rule, queue: list[Rule]) -> None:
        head = rule.head

        # Reduce the head to: falsum, an atom, or a single box over an atom.
        head_box: Optional[tuple[bool, Window]] = None
        if isinstance(head, Modal):
            if not head.op.is_box:
                raise NormalizationError(
                    f"diamond operator in rule head: {format_rule(rule)}"
                )
            if isinstance(head.body, Atom):
                head_box = (head.op is TemporalOp.BOX_FUTURE, head.window)
                head = head.body
            else:
                # Nested head modality: keep the outer box over a fresh symbol
                # and define the inner literal from it.
                inner = head.body
                fresh = self.fresh_atom(
                    literal_vars(inner), f"head of: {format_rule(rule)}"
                )
                queue.append(Rule(inner, (fresh,)))
                self.rewrite(
                    Rule(Modal(head.op, head.window, fresh), rule.body), queue
                )
                return
        elif isinstance(head, Comparison):
            raise NormalizationError(
                f"comparison in rule head: {format_rule(rule)}"
            )

        # Split the body into comparisons and temporal literals; fold the
        # comparisons that mention no variable.
        filters: list[Comparison] = []
        temporal: list[Literal] = []
        for lit in rule.body:
            if isinstance(lit, Comparison):
                if isinstance(lit.left, Constant) and isinstance(lit.right, Constant):
                    holds = (lit.left.name == lit.right.name) != lit.negated
                    if not holds:
                        return  # body unsatisfiable: drop the rule
                    continue
                filters.append(lit)
            else:
                temporal.append(lit)
        if not temporal:
            raise NormalizationError(
                f"rule body has no relational atom: {format_rule(rule)}"
            )

        # Whole-body box with a plain-atom head maps straight to BOX_BODY.
        if (
            head_box is None
            and head is not None
            and not filters
            and len(temporal) == 1
            and isinstance(temporal[0], Modal)
            and temporal[0].op.is_box
            and isinstance(temporal[0].body, Atom)
        ):
            box = temporal[0]
            self.out.append(
                BoxBodyRule(
                    box.op is TemporalOp.BOX_FUTURE, box.window, head, box.body
                )
            )
            return

        # Flatten every body literal to an atom, pushing side rules onto the
        # queue for fresh symbols.
        rule_vars = [literal_vars(lit) for lit in temporal]
        if head is not None:
            head_vars = literal_vars(head)
        else:
            head_vars = set()
        filter_vars = set()
        for f in filters:
            filter_vars |= literal_vars(f)

        atoms: list[Atom] = []
        for idx, lit in enumerate(temporal):
            rest: set[str] = set(head_vars) | filter_vars
            for j, vs in enumerate(rule_vars):
                if j != idx:
                    rest |= vs
            atoms.append(self.flatten(lit, rest, rule, queue))

        if head_box is not None:
            future, window = head_box
            if len(atoms) == 1 and not filters:
                self.out.append(BoxHeadRule(future, window, head, atoms[0]))
            else:
                fresh = self.fresh_atom(
                    literal_vars(head), f"body of: {format_rule(rule)}"
                )
                self.out.append(BoxHeadRule(future, window, head, fresh))
                queue.append(Rule(fresh, tuple(atoms) + tuple(filters)))
            return

        self.assemble(head, atoms, filters)

    def flatten(
        self, lit: Literal, needed: set[str], origin: Rule, queue: list[Rule]
    ) -> Atom:
        if isinstance(lit, Atom):
            return lit
        assert isinstance(lit, Modal)
        fresh = self.fresh_atom(
            literal_vars(lit) & needed, format_literal(lit)
        )
        if lit.op.is_box:
            # box literal inside a conjunction: name its extension.
            queue.append(Rule(fresh, (Modal(lit.op, lit.window, lit.body),)))
        elif lit.op is TemporalOp.DIAMOND_PAST:
            # "sometime within the past window" holds exactly where a future
            # box from each witness reaches; define the fresh symbol so its
            # minimal extension is that set.
            queue.append(
                Rule(Modal(TemporalOp.BOX_FUTURE, lit.window, fresh), (lit.body,))
            )
        else:
            queue.append(
                Rule(Modal(TemporalOp.BOX_PAST, lit.window, fresh), (lit.body,))
            )
        return fresh

    def assemble(
        self, head: Optional[Atom], atoms: list[Atom], filters: list[Comparison]
    ) -> None:
        if len(atoms) == 1:
            if filters:
                self.out.append(JoinRule(head, atoms[0], atoms[0], tuple(filters)))
            else:
                self.out.append(CopyRule(head, atoms[0]))
            return
        if len(atoms) == 2:
            self.out.append(JoinRule(head, atoms[0], atoms[1], tuple(filters)))
            return
        head_vars = set() if head is None else literal_vars(head)
        filter_vars: set[str] = set()
        for f in filters:
            filter_vars |= literal_vars(f)
        current = atoms[0]
        for idx in range(1, len(atoms)):
            if idx == len(atoms) - 1:
                self.out.append(JoinRule(head, current, atoms[idx], tuple(filters)))
                break
            used_later = set(head_vars) | filter_vars
            for later in atoms[idx + 1 :]:
                used_later |= literal_vars(later)
            carry = (literal_vars(current) | literal_vars(atoms[idx])) & used_later
            fresh = self.fresh_atom(carry, f"join of {format_atom_pair(current, atoms[idx])}")
            self.out.append(JoinRule(fresh, current, atoms[idx], ()))
            current = fresh


def format_atom_pair(a: Atom, b: Atom) -> str:
    return f"{format_literal(a)} and {format_literal(b)}"


def normalize(ontology: Ontology) -> NormalizedOntology:
    """Rewrite to normal form; certain answers over original predicates are kept."""
    return _Normalizer().run(ontology)
