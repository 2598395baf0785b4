"""Random non-recursive programs and data for differential testing.

Instances are built level by level so the dependency relation is acyclic by
construction, variables are chosen so every rule is safe, and windows are
always consistent.  Endpoints come from a small integer grid (with occasional
halves) to keep the naive evaluator's critical-point grid tiny.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .intervals import Interval, NEG_INF, POS_INF, TimePoint, Window
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
    Variable,
)

_VARS = ("x", "y", "z")
_CONSTANTS = ("ca", "cb", "cc")
_BOXES = (TemporalOp.BOX_FUTURE, TemporalOp.BOX_PAST)
_DIAMONDS = (TemporalOp.DIAMOND_FUTURE, TemporalOp.DIAMOND_PAST)


@dataclass(frozen=True)
class GenConfig:
    max_predicates: int = 5
    max_arity: int = 2
    max_rules: int = 8
    max_levels: int = 3
    max_facts: int = 12
    max_body: int = 3
    endpoint_range: int = 14
    allow_diamonds: bool = True
    allow_nesting: bool = True
    allow_falsum: bool = True
    allow_filters: bool = True
    require_temporal: bool = False  # force at least one diamond/nested literal


def random_window(rng: random.Random) -> Window:
    lo = Fraction(rng.choice((0, 0, 1, 2)))
    if rng.random() < 0.1:
        lo += Fraction(1, 2)
    if rng.random() < 0.15:
        return Window(lo, True, lo, True)
    hi = lo + rng.choice((1, 2, 3))
    if rng.random() < 0.1:
        hi += Fraction(1, 2)
    return Window(lo, rng.random() < 0.5, hi, rng.random() < 0.5)


def _random_interval(rng: random.Random, span: int) -> Interval:
    if rng.random() < 0.04:
        return Interval.unbounded()
    lo = rng.randint(0, span)
    if rng.random() < 0.1:
        return Interval.point(lo)
    hi = rng.randint(lo + 1, span + 4)
    lo_tp: TimePoint = TimePoint.finite(lo)
    hi_tp: TimePoint = TimePoint.finite(hi)
    if rng.random() < 0.06:
        lo_tp = NEG_INF
    if rng.random() < 0.06:
        hi_tp = POS_INF
    return Interval(lo_tp, rng.random() < 0.5, hi_tp, rng.random() < 0.5)


def _wrap_modal(
    rng: random.Random, literal: Literal, config: GenConfig, force: bool = False
) -> Literal:
    depth = 0
    if force or rng.random() < 0.55:
        depth = 1
        if config.allow_nesting and rng.random() < 0.22:
            depth = 2
    for _ in range(depth):
        ops = _BOXES + (_DIAMONDS if config.allow_diamonds else ())
        literal = Modal(rng.choice(ops), random_window(rng), literal)
    return literal


def random_instance(
    rng: random.Random, config: GenConfig = GenConfig()
) -> tuple[Ontology, list[Fact], Query]:
    n_preds = rng.randint(2, config.max_predicates)
    levels = rng.randint(1, config.max_levels)
    predicates: list[tuple[str, int, int]] = []  # (name, arity, level)
    for i in range(n_preds):
        level = 0 if i == 0 else rng.randint(0, levels)
        predicates.append((f"P{i}", rng.randint(0, config.max_arity), level))

    def preds_below(level: int) -> list[tuple[str, int, int]]:
        return [p for p in predicates if p[2] < level]

    def body_atom(rng_vars: list[str], level: int) -> Atom:
        name, arity, _ = rng.choice(preds_below(level))
        args: list = []
        for _ in range(arity):
            if rng.random() < 0.2:
                args.append(Constant(rng.choice(_CONSTANTS)))
            else:
                args.append(Variable(rng.choice(rng_vars)))
        return Atom(name, tuple(args))

    rules: list[Rule] = []
    forced_temporal = not config.require_temporal
    n_rules = rng.randint(1, config.max_rules)
    heads = [p for p in predicates if p[2] > 0]
    if not heads:
        predicates[-1] = (predicates[-1][0], predicates[-1][1], 1)
        heads = [predicates[-1]]

    for _ in range(n_rules):
        name, arity, level = rng.choice(heads)
        scope_vars = list(rng.sample(_VARS, rng.randint(1, len(_VARS))))
        body: list[Literal] = []
        n_body = rng.randint(1, config.max_body)
        for i in range(n_body):
            atom = body_atom(scope_vars, level)
            force = not forced_temporal and i == 0
            lit = _wrap_modal(rng, atom, config, force=force)
            if force and isinstance(lit, Modal):
                forced_temporal = True
            body.append(lit)

        bound_vars = sorted(
            {
                t.name
                for lit in body
                for atom in _atoms_of(lit)
                for t in atom.args
                if isinstance(t, Variable)
            }
        )
        if config.allow_filters and len(bound_vars) >= 2 and rng.random() < 0.3:
            left, right = rng.sample(bound_vars, 2)
            body.append(
                Comparison(Variable(left), rng.random() < 0.7, Variable(right))
            )

        head_args: list = []
        for _ in range(arity):
            if bound_vars and rng.random() < 0.8:
                head_args.append(Variable(rng.choice(bound_vars)))
            else:
                head_args.append(Constant(rng.choice(_CONSTANTS)))
        head: Literal = Atom(name, tuple(head_args))
        if rng.random() < 0.3:
            head = Modal(rng.choice(_BOXES), random_window(rng), head)
            if config.allow_nesting and rng.random() < 0.1:
                head = Modal(rng.choice(_BOXES), random_window(rng), head)
        rules.append(Rule(head, tuple(body)))

    if config.allow_falsum and rng.random() < 0.18:
        candidates = [p for p in predicates if p[1] == 0] or predicates
        first = rng.choice(candidates)
        second = rng.choice(candidates)

        def ground_atom(p: tuple[str, int, int]) -> Atom:
            return Atom(
                p[0],
                tuple(Constant(rng.choice(_CONSTANTS)) for _ in range(p[1])),
            )

        rules.append(Rule(None, (ground_atom(first), ground_atom(second))))

    ontology = Ontology(tuple(rules))

    facts: list[Fact] = []
    for _ in range(rng.randint(1, config.max_facts)):
        name, arity, _ = rng.choice(predicates)
        atom = Atom(
            name, tuple(Constant(rng.choice(_CONSTANTS)) for _ in range(arity))
        )
        facts.append(Fact(atom, _random_interval(rng, config.endpoint_range)))

    if rng.random() < 0.05:
        q_atom = Atom("Unknown", ())
    else:
        name, arity, _ = rng.choice(predicates)
        q_args: list = []
        for i in range(arity):
            if rng.random() < 0.25:
                q_args.append(Constant(rng.choice(_CONSTANTS)))
            else:
                q_args.append(Variable(_VARS[i]))
        q_atom = Atom(name, tuple(q_args))
    query = Query(q_atom, "q")
    return ontology, facts, query


def _atoms_of(literal: Literal):
    if isinstance(literal, Atom):
        yield literal
    elif isinstance(literal, Modal):
        yield from _atoms_of(literal.body)
