"""Bottom-up evaluation of normalized programs and query answering.

Tables are computed once per predicate in topological order (non-recursive
programs have no fixpoint loop): a predicate's table is the coalesced union
of its data facts and of every rule contribution.  Tables are immutable once
their stratum completes; contributions of the rules for one predicate are
independent, so they may be computed by a thread pool and merged in rule
order, which keeps results scheduling-invariant.
"""

from __future__ import annotations

import itertools
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .intervals import (
    Interval,
    IntervalSet,
    coalesce,
    shift_box_head,
    shrink_box_body,
)
from .model import (
    Atom,
    Comparison,
    Constant,
    Fact,
    Query,
    Term,
    Variable,
    individuals,
)
from .normalform import (
    BoxBodyRule,
    BoxHeadRule,
    CopyRule,
    JoinRule,
    NormalizedOntology,
    NormalRule,
    normal_head_predicate,
)
from .strata import build_graph, check_nonrecursive

THREADS_ENV_VAR = "CHRONOLOG_THREADS"

Row = tuple[str, ...]


class Status(Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Table:
    predicate: str
    arity: int
    rows: dict[Row, IntervalSet] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class Answer:
    values: Row
    interval: Interval


@dataclass(frozen=True)
class AnswerSet:
    status: Status
    answers: tuple[Answer, ...]


@dataclass(frozen=True, slots=True)
class StratumStat:
    predicate: str
    rules: int
    rows: int
    intervals: int
    seconds: float


@dataclass(frozen=True)
class RunResult:
    tables: dict[str, Table]
    inconsistent: bool
    individuals: tuple[str, ...]
    stats: tuple[StratumStat, ...]


# ---------------------------------------------------------------------------
# Matching


def match_atom(
    atom: Atom, row: Row, bindings: Optional[dict[str, str]] = None
) -> Optional[dict[str, str]]:
    """Unify an atom's argument pattern with a row of constants.

    Returns the extended bindings, or None on mismatch.  The passed-in
    bindings are not mutated.
    """
    out = dict(bindings) if bindings else {}
    for term, value in zip(atom.args, row):
        if isinstance(term, Constant):
            if term.name != value:
                return None
        else:
            bound = out.get(term.name)
            if bound is None:
                out[term.name] = value
            elif bound != value:
                return None
    return out


def _resolve(term: Term, bindings: Mapping[str, str]) -> str:
    if isinstance(term, Constant):
        return term.name
    return bindings[term.name]


def _filters_hold(
    filters: Sequence[Comparison], bindings: Mapping[str, str]
) -> bool:
    for f in filters:
        equal = _resolve(f.left, bindings) == _resolve(f.right, bindings)
        if equal == f.negated:
            return False
    return True


def _head_row(head: Atom, bindings: Mapping[str, str]) -> Row:
    return tuple(_resolve(t, bindings) for t in head.args)


Contribution = dict[Row, list[Interval]]


def _add(acc: Contribution, row: Row, intervals: Iterable[Interval]) -> None:
    acc.setdefault(row, []).extend(intervals)


# ---------------------------------------------------------------------------
# Per-rule evaluation


def eval_join(rule: JoinRule, tables: Mapping[str, Table]) -> Contribution:
    left_table = tables.get(rule.left.predicate)
    right_table = tables.get(rule.right.predicate)
    acc: Contribution = {}
    if left_table is None or right_table is None:
        return acc

    shared = sorted(
        {t.name for t in rule.left.args if isinstance(t, Variable)}
        & {t.name for t in rule.right.args if isinstance(t, Variable)}
    )

    right_index: dict[
        tuple[str, ...], list[tuple[dict[str, str], IntervalSet]]
    ] = {}
    for row, rset in right_table.rows.items():
        bound = match_atom(rule.right, row)
        if bound is None:
            continue
        key = tuple(bound[v] for v in shared)
        right_index.setdefault(key, []).append((bound, rset))

    head = rule.head
    for lrow, lset in left_table.rows.items():
        lbound = match_atom(rule.left, lrow)
        if lbound is None:
            continue
        key = tuple(lbound[v] for v in shared)
        for rbound, rset in right_index.get(key, ()):
            merged = dict(lbound)
            merged.update(rbound)
            if not _filters_hold(rule.filters, merged):
                continue
            pieces = lset.intersection(rset)
            if not pieces:
                continue
            row = () if head is None else _head_row(head, merged)
            _add(acc, row, pieces)
    return acc


def eval_copy(rule: CopyRule, tables: Mapping[str, Table]) -> Contribution:
    table = tables.get(rule.body.predicate)
    acc: Contribution = {}
    if table is None:
        return acc
    head = rule.head
    for row, iset in table.rows.items():
        bound = match_atom(rule.body, row)
        if bound is None:
            continue
        out_row = () if head is None else _head_row(head, bound)
        _add(acc, out_row, iset)
    return acc


def eval_box_head(rule: BoxHeadRule, tables: Mapping[str, Table]) -> Contribution:
    table = tables.get(rule.body.predicate)
    acc: Contribution = {}
    if table is None:
        return acc
    for row, iset in table.rows.items():
        bound = match_atom(rule.body, row)
        if bound is None:
            continue
        shifted = [shift_box_head(iv, rule.window, rule.future) for iv in iset]
        _add(acc, _head_row(rule.head, bound), shifted)
    return acc


def eval_box_body(rule: BoxBodyRule, tables: Mapping[str, Table]) -> Contribution:
    table = tables.get(rule.body.predicate)
    acc: Contribution = {}
    if table is None:
        return acc
    for row, iset in table.rows.items():
        bound = match_atom(rule.body, row)
        if bound is None:
            continue
        pieces = [
            candidate
            for candidate in (
                shrink_box_body(iv, rule.window, rule.future) for iv in iset
            )
            if not candidate.is_empty()
        ]
        if pieces:
            _add(acc, _head_row(rule.head, bound), pieces)
    return acc


def eval_rule(rule: NormalRule, tables: Mapping[str, Table]) -> Contribution:
    if isinstance(rule, JoinRule):
        return eval_join(rule, tables)
    if isinstance(rule, CopyRule):
        return eval_copy(rule, tables)
    if isinstance(rule, BoxHeadRule):
        return eval_box_head(rule, tables)
    return eval_box_body(rule, tables)


# ---------------------------------------------------------------------------
# Whole-program evaluation


def default_thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run(
    program: NormalizedOntology,
    facts: Sequence[Fact],
    *,
    threads: Optional[int] = None,
) -> RunResult:
    """Compute every predicate table and the falsum status.

    ``threads`` > 1 evaluates the rule contributions of each stratum in a
    thread pool; results are merged in rule order, so the outcome does not
    depend on scheduling.  Defaults to the CHRONOLOG_THREADS environment
    variable (or single-threaded).
    """
    if threads is None:
        threads = default_thread_count()

    arity: dict[str, int] = {}
    facts_by_pred: dict[str, dict[Row, list[Interval]]] = {}
    for fact in facts:
        arity.setdefault(fact.atom.predicate, fact.atom.arity)
        rows = facts_by_pred.setdefault(fact.atom.predicate, {})
        key = tuple(t.name for t in fact.atom.args)
        rows.setdefault(key, []).append(fact.interval)

    rules_by_pred: dict[str, list[NormalRule]] = {}
    falsum_rules: list[NormalRule] = []
    for rule in program.rules:
        head = normal_head_predicate(rule)
        if head is None:
            falsum_rules.append(rule)
        else:
            rules_by_pred.setdefault(head, []).append(rule)
            head_atom = rule.head
            arity.setdefault(head_atom.predicate, head_atom.arity)

    order = check_nonrecursive(build_graph(program))
    order += sorted(set(facts_by_pred) - set(order))

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    tables: dict[str, Table] = {}
    stats: list[StratumStat] = []
    try:
        for predicate in order:
            started = time.perf_counter()
            rules = rules_by_pred.get(predicate, [])
            merged: Contribution = {}
            for row, intervals in facts_by_pred.get(predicate, {}).items():
                _add(merged, row, intervals)
            if pool is not None and len(rules) > 1:
                contributions = list(
                    pool.map(lambda r: eval_rule(r, tables), rules)
                )
            else:
                contributions = [eval_rule(r, tables) for r in rules]
            for contribution in contributions:
                for row, intervals in contribution.items():
                    _add(merged, row, intervals)
            rows = {}
            for row, intervals in merged.items():
                iset = coalesce(intervals)
                if iset:
                    rows[row] = iset
            tables[predicate] = Table(predicate, arity.get(predicate, 0), rows)
            stats.append(
                StratumStat(
                    predicate,
                    len(rules),
                    len(rows),
                    sum(len(s) for s in rows.values()),
                    time.perf_counter() - started,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()

    inconsistent = False
    for rule in falsum_rules:
        if eval_rule(rule, tables):
            inconsistent = True
            break

    return RunResult(tables, inconsistent, individuals(facts), tuple(stats))


def _answer_sort_key(answer: Answer):
    return (answer.values, answer.interval.lo_key, answer.interval.hi_key)


def answer(query: Query, result: RunResult) -> AnswerSet:
    """Certain answers to the query given a completed run.

    On an inconsistent knowledge base every tuple over the data constants is
    entailed everywhere, so all of them are returned over (-inf, +inf).
    Queries over unknown predicates yield an empty consistent answer set.
    """
    m = query.atom.arity
    if result.inconsistent:
        everything = Interval.unbounded()
        answers = tuple(
            Answer(combo, everything)
            for combo in itertools.product(result.individuals, repeat=m)
        )
        return AnswerSet(Status.INCONSISTENT, answers)

    table = result.tables.get(query.atom.predicate)
    collected: list[Answer] = []
    if table is not None:
        for row, iset in table.rows.items():
            if match_atom(query.atom, row) is None:
                continue
            collected.extend(Answer(row, iv) for iv in iset)
    collected.sort(key=_answer_sort_key)
    return AnswerSet(Status.CONSISTENT, tuple(collected))


# ---------------------------------------------------------------------------
# Output formats


def format_tsv(query: Query, answer_set: AnswerSet) -> str:
    """One row per answer: predicate, constants, lo, loBound, hi, hiBound."""
    lines = []
    for ans in answer_set.answers:
        iv = ans.interval
        lines.append(
            "\t".join(
                [query.atom.predicate]
                + list(ans.values)
                + [
                    str(iv.lo),
                    "[" if iv.lo_closed else "(",
                    str(iv.hi),
                    "]" if iv.hi_closed else ")",
                ]
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def format_json(query: Query, answer_set: AnswerSet) -> str:
    doc = {
        "predicate": query.atom.predicate,
        "status": answer_set.status.value,
        "answers": [
            {
                "tuple": list(ans.values),
                "interval": {
                    "lo": str(ans.interval.lo),
                    "lo_closed": ans.interval.lo_closed,
                    "hi": str(ans.interval.hi),
                    "hi_closed": ans.interval.hi_closed,
                },
            }
            for ans in answer_set.answers
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
