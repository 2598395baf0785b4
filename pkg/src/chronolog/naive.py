"""Deliberately naive reference evaluation for differential testing.

This module answers queries straight from the dense-time semantics: it builds
a finite grid of critical time points (data endpoints closed under the window
distances reachable along rule dependencies), splits the line into elementary
regions (the points and the open gaps between them), and decides each literal
per region by direct for-all / exists window checks at sample points.  Truth
is constant within a region; a runtime self-check re-evaluates everything at
a second sample per region and rejects any disagreement.

None of the evaluator's interval algebra (edge tables, shifting, shrinking,
coalescing, sweeping intersection) is used here, so agreement between the two
is meaningful evidence.  The implementation is quadratic or worse by design
and guarded against large inputs.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Mapping, Optional, Sequence, Union

from .engine import Answer, AnswerSet, Row, Status
from .errors import NormalizationError, OracleSizeError
from .intervals import NEG_INF, POS_INF, Interval, TimePoint, Window, as_timepoint
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
    individuals,
    literal_atoms,
    literal_vars,
    ontology_constants,
    rule_windows,
)
from .strata import build_graph, check_nonrecursive

MAX_FACTS = 64
MAX_RULES = 32
MAX_GRID_POINTS = 5000


# ---------------------------------------------------------------------------
# Interval-table closure (used to cross-check coalescing)


def _lo_key(iv: Interval):
    return (iv.lo, 0 if iv.lo_closed else 1)


def _hi_key(iv: Interval):
    return (iv.hi, 1 if iv.hi_closed else 0)


def _tables_connect(a: Interval, b: Interval) -> bool:
    """True when the union of the two intervals is a single interval.

    Overlap counts, and so does touching endpoints provided at least one of
    the facing bounds includes the touching point.
    """
    lo = max(_lo_key(a), _lo_key(b))
    hi = min(_hi_key(a), _hi_key(b))
    if lo[0] < hi[0]:
        return True
    if lo[0] == hi[0] and lo[0].is_finite:
        if lo[1] == 0 and hi[1] == 1:
            return True  # proper one-point overlap
        # touching: the point belongs to at least one side
        return (lo[1] == 0) or (hi[1] == 1)
    return False


def naive_closure(intervals: Sequence[Interval]) -> frozenset[Interval]:
    """Least table containing the input and closed under concatenation.

    Concatenation extends a stored interval through any input interval whose
    upper endpoint reaches at least as far, whenever the two connect.
    Iterates to fixpoint; quadratic on purpose.
    """
    base = [iv for iv in intervals if not iv.is_empty()]
    closure: set[Interval] = set(base)
    changed = True
    while changed:
        changed = False
        for a in base:
            for b in list(closure):
                if b.hi > a.hi or not _tables_connect(a, b):
                    continue
                combined = Interval(b.lo, b.lo_closed, a.hi, a.hi_closed)
                if combined not in closure and not combined.is_empty():
                    closure.add(combined)
                    changed = True
    return frozenset(closure)


def closure_maximal(intervals: Sequence[Interval]) -> tuple[Interval, ...]:
    """Containment-maximal elements of the closure, sorted."""
    closure = naive_closure(intervals)

    def contains(a: Interval, b: Interval) -> bool:
        return _lo_key(a) <= _lo_key(b) and _hi_key(b) <= _hi_key(a)

    maximal = [
        m
        for m in closure
        if not any(o != m and contains(o, m) for o in closure)
    ]
    maximal.sort(key=lambda iv: (_lo_key(iv), _hi_key(iv)))
    return tuple(maximal)


# ---------------------------------------------------------------------------
# Elementary regions


class RegionGrid:
    """Sorted critical points and the elementary regions they induce.

    Regions are indexed 0..2n: even indices are open gaps (the outermost two
    are unbounded), odd indices are the singleton critical points.
    """

    def __init__(self, values: Iterable[Fraction]):
        self.values: list[Fraction] = sorted(set(values))
        self.count = 2 * len(self.values) + 1

    def sample(self, idx: int, alt: bool) -> Fraction:
        values = self.values
        if idx % 2 == 1:
            return values[idx // 2]
        left = values[idx // 2 - 1] if idx > 0 else None
        right = values[idx // 2] if idx // 2 < len(values) else None
        if left is None and right is None:
            return Fraction(1) if alt else Fraction(0)
        if left is None:
            return right - (2 if alt else 1)
        if right is None:
            return left + (2 if alt else 1)
        gap = right - left
        return left + gap * (Fraction(2, 3) if alt else Fraction(1, 3))

    def locate(self, value: Fraction) -> int:
        j = bisect_left(self.values, value)
        if j < len(self.values) and self.values[j] == value:
            return 2 * j + 1
        return 2 * j

    def span(
        self,
        lo: TimePoint,
        lo_closed: bool,
        hi: TimePoint,
        hi_closed: bool,
    ) -> Optional[tuple[int, int]]:
        """Index range of the regions intersecting the given interval."""
        values = self.values
        if not lo.is_finite:
            first = 0
        else:
            j = bisect_left(values, lo.seconds)
            if j < len(values) and values[j] == lo.seconds:
                first = 2 * j + 1 if lo_closed else 2 * j + 2
            else:
                first = 2 * j
        if not hi.is_finite:
            last = self.count - 1
        else:
            j = bisect_left(values, hi.seconds)
            if j < len(values) and values[j] == hi.seconds:
                last = 2 * j + 1 if hi_closed else 2 * j
            else:
                last = 2 * j
        if first > last:
            return None
        return first, last

    def region_interval(self, idx: int) -> Interval:
        values = self.values
        if idx % 2 == 1:
            point = TimePoint.finite(values[idx // 2])
            return Interval(point, True, point, True)
        lo = TimePoint.finite(values[idx // 2 - 1]) if idx > 0 else NEG_INF
        hi = (
            TimePoint.finite(values[idx // 2])
            if idx // 2 < len(values)
            else POS_INF
        )
        return Interval(lo, False, hi, False)


def _rule_offsets(rule: Rule) -> set[Fraction]:
    offsets: set[Fraction] = {Fraction(0)}
    for window in rule_windows(rule):
        steps = (Fraction(0), window.lo, window.hi, -window.lo, -window.hi)
        offsets = {o + s for o in offsets for s in steps}
    return offsets


def _grid_values(
    ontology: Ontology,
    facts: Sequence[Fact],
    order: Sequence[str],
    rules_by_head: Mapping[str, Sequence[Rule]],
) -> list[Fraction]:
    critical: dict[str, set[Fraction]] = {}
    for fact in facts:
        points = critical.setdefault(fact.atom.predicate, set())
        for tp in (fact.interval.lo, fact.interval.hi):
            if tp.is_finite:
                points.add(tp.seconds)

    for predicate in order:
        target = critical.setdefault(predicate, set())
        for rule in rules_by_head.get(predicate, ()):
            offsets = _rule_offsets(rule)
            source: set[Fraction] = set()
            for lit in rule.body:
                for atom in literal_atoms(lit):
                    source |= critical.get(atom.predicate, set())
            target |= {c + off for c in source for off in offsets}

    merged: set[Fraction] = set()
    for points in critical.values():
        merged |= points
    if len(merged) > MAX_GRID_POINTS:
        raise OracleSizeError(
            f"critical-point grid too large for the naive evaluator "
            f"({len(merged)} points)"
        )
    return sorted(merged)


# ---------------------------------------------------------------------------
# Region-wise evaluation of a whole program


def _head_chain(rule: Rule) -> tuple[list[tuple[TemporalOp, Window]], Optional[Atom]]:
    chain: list[tuple[TemporalOp, Window]] = []
    lit = rule.head
    while isinstance(lit, Modal):
        if not lit.op.is_box:
            raise NormalizationError("diamond operator in rule head")
        chain.append((lit.op, lit.window))
        lit = lit.body
    return chain, lit if isinstance(lit, Atom) else None


def _window_image(
    t: Fraction, window: Window, future: bool
) -> tuple[TimePoint, bool, TimePoint, bool]:
    if future:
        return (
            TimePoint.finite(t + window.lo),
            window.lo_inclusive,
            TimePoint.finite(t + window.hi),
            window.hi_inclusive,
        )
    return (
        TimePoint.finite(t - window.hi),
        window.hi_inclusive,
        TimePoint.finite(t - window.lo),
        window.lo_inclusive,
    )


class _RegionEvaluation:
    def __init__(self, ontology: Ontology, facts: Sequence[Fact], alt: bool):
        if len(facts) > MAX_FACTS or len(ontology.rules) > MAX_RULES:
            raise OracleSizeError(
                "input beyond the naive evaluator's size guard "
                f"({len(facts)} facts, {len(ontology.rules)} rules)"
            )
        self.alt = alt
        self.facts = list(facts)
        self.rules = list(ontology.rules)

        rules_by_head: dict[str, list[Rule]] = {}
        self.falsum_rules: list[Rule] = []
        for rule in self.rules:
            chain, atom = _head_chain(rule)
            if atom is None:
                self.falsum_rules.append(rule)
            else:
                rules_by_head.setdefault(atom.predicate, []).append(rule)

        graph = build_graph(ontology)
        order = check_nonrecursive(graph)
        fact_preds = sorted({f.atom.predicate for f in self.facts})
        order += [p for p in fact_preds if p not in set(order)]

        self.grid = RegionGrid(
            _grid_values(ontology, self.facts, order, rules_by_head)
        )
        self.samples = [
            self.grid.sample(r, alt) for r in range(self.grid.count)
        ]
        self.domain: tuple[str, ...] = tuple(
            sorted(set(individuals(self.facts)) | ontology_constants(ontology))
        )
        self.vectors: dict[tuple[str, Row], list[bool]] = {}

        for predicate in order:
            for fact in self.facts:
                if fact.atom.predicate != predicate:
                    continue
                iv = fact.interval
                span = self.grid.span(iv.lo, iv.lo_closed, iv.hi, iv.hi_closed)
                if span is None:
                    continue
                row = tuple(t.name for t in fact.atom.args)
                vec = self._vector_for(predicate, row)
                for r in range(span[0], span[1] + 1):
                    vec[r] = True
            for rule in rules_by_head.get(predicate, ()):
                self._apply_rule(rule)

        self.inconsistent = any(
            self._rule_fires(rule) for rule in self.falsum_rules
        )

    # -- storage ------------------------------------------------------------

    def _vector_for(self, predicate: str, row: Row) -> list[bool]:
        key = (predicate, row)
        vec = self.vectors.get(key)
        if vec is None:
            vec = [False] * self.grid.count
            self.vectors[key] = vec
        return vec

    # -- literal evaluation ---------------------------------------------------

    def _atom_vector(self, atom: Atom, bindings: Mapping[str, str]) -> list[bool]:
        row = tuple(
            t.name if isinstance(t, Constant) else bindings[t.name]
            for t in atom.args
        )
        vec = self.vectors.get((atom.predicate, row))
        return vec if vec is not None else [False] * self.grid.count

    def _quantified(
        self, inner: list[bool], window: Window, future: bool, universal: bool
    ) -> list[bool]:
        prefix = [0] + list(accumulate(int(b) for b in inner))
        out = [False] * self.grid.count
        for r in range(self.grid.count):
            span = self.grid.span(*_window_image(self.samples[r], window, future))
            if span is None:
                continue
            first, last = span
            hits = prefix[last + 1] - prefix[first]
            out[r] = hits == last + 1 - first if universal else hits > 0
        return out

    def _literal_vector(
        self, lit: Literal, bindings: Mapping[str, str]
    ) -> list[bool]:
        if isinstance(lit, Atom):
            return self._atom_vector(lit, bindings)
        if isinstance(lit, Comparison):
            left = (
                lit.left.name
                if isinstance(lit.left, Constant)
                else bindings[lit.left.name]
            )
            right = (
                lit.right.name
                if isinstance(lit.right, Constant)
                else bindings[lit.right.name]
            )
            value = (left == right) != lit.negated
            return [value] * self.grid.count
        inner = self._literal_vector(lit.body, bindings)
        return self._quantified(
            inner, lit.window, lit.op.is_future, lit.op.is_box
        )

    def _body_vector(
        self, rule: Rule, bindings: Mapping[str, str]
    ) -> Optional[list[bool]]:
        vec: Optional[list[bool]] = None
        for lit in rule.body:
            lv = self._literal_vector(lit, bindings)
            vec = lv if vec is None else [a and b for a, b in zip(vec, lv)]
            if not any(vec):
                return None
        return vec

    # -- rule application -----------------------------------------------------

    def _assignments(self, rule: Rule):
        names: set[str] = set()
        if rule.head is not None:
            names |= literal_vars(rule.head)
        for lit in rule.body:
            names |= literal_vars(lit)
        ordered = sorted(names)
        for combo in itertools.product(self.domain, repeat=len(ordered)):
            yield dict(zip(ordered, combo))

    def _rule_feasible(self, rule: Rule) -> bool:
        for lit in rule.body:
            atoms = list(literal_atoms(lit))
            if not atoms:
                continue
            if all(
                not any(key[0] == atom.predicate for key in self.vectors)
                for atom in atoms
            ):
                return False
        return True

    def _apply_rule(self, rule: Rule) -> None:
        if not self._rule_feasible(rule):
            return
        chain, head = _head_chain(rule)
        assert head is not None
        for bindings in self._assignments(rule):
            vec = self._body_vector(rule, bindings)
            if vec is None:
                continue
            for op, window in chain:
                # Whatever the box ranges over must hold on the whole image
                # of the body region: a point is required exactly when some
                # body point reaches it through the window.
                vec = self._quantified(
                    vec, window, future=not op.is_future, universal=False
                )
            row = tuple(
                t.name if isinstance(t, Constant) else bindings[t.name]
                for t in head.args
            )
            target = self._vector_for(head.predicate, row)
            for r, bit in enumerate(vec):
                if bit:
                    target[r] = True

    def _rule_fires(self, rule: Rule) -> bool:
        if not self._rule_feasible(rule):
            return False
        for bindings in self._assignments(rule):
            if self._body_vector(rule, bindings) is not None:
                return True
        return False

    # -- extraction -------------------------------------------------------------

    def intervals_for(self, predicate: str, row: Row) -> tuple[Interval, ...]:
        vec = self.vectors.get((predicate, row))
        if vec is None:
            return ()
        out: list[Interval] = []
        r = 0
        while r < self.grid.count:
            if not vec[r]:
                r += 1
                continue
            start = r
            while r + 1 < self.grid.count and vec[r + 1]:
                r += 1
            first = self.grid.region_interval(start)
            last = self.grid.region_interval(r)
            out.append(
                Interval(first.lo, first.lo_closed, last.hi, last.hi_closed)
            )
            r += 1
        return tuple(out)


@dataclass(frozen=True)
class NaiveResult:
    intervals: dict[tuple[str, Row], tuple[Interval, ...]]
    inconsistent: bool
    individuals: tuple[str, ...]


def naive_evaluate(
    ontology: Ontology, facts: Sequence[Fact], *, self_check: bool = True
) -> NaiveResult:
    """Entailed maximal intervals for every predicate and tuple, plus status."""
    first = _RegionEvaluation(ontology, facts, alt=False)
    if self_check:
        second = _RegionEvaluation(ontology, facts, alt=True)
        if (
            first.vectors != second.vectors
            or first.inconsistent != second.inconsistent
        ):
            raise AssertionError(
                "region constancy violated: verdicts differ between sample points"
            )
    table = {
        key: first.intervals_for(*key)
        for key in first.vectors
        if any(first.vectors[key])
    }
    return NaiveResult(table, first.inconsistent, individuals(facts))


def _pattern_matches(atom: Atom, row: Row) -> bool:
    seen: dict[str, str] = {}
    for term, value in zip(atom.args, row):
        if isinstance(term, Constant):
            if term.name != value:
                return False
        else:
            bound = seen.setdefault(term.name, value)
            if bound != value:
                return False
    return True


def naive_answer(
    ontology: Ontology,
    facts: Sequence[Fact],
    query: Query,
    *,
    self_check: bool = True,
) -> AnswerSet:
    """Certain answers assembled from per-region truth, for cross-checking."""
    result = naive_evaluate(ontology, facts, self_check=self_check)
    if result.inconsistent:
        everything = Interval.unbounded()
        answers = tuple(
            Answer(combo, everything)
            for combo in itertools.product(
                result.individuals, repeat=query.atom.arity
            )
        )
        return AnswerSet(Status.INCONSISTENT, answers)
    collected = [
        Answer(row, iv)
        for (pred, row), intervals in result.intervals.items()
        if pred == query.atom.predicate and _pattern_matches(query.atom, row)
        for iv in intervals
    ]
    collected.sort(key=lambda a: (a.values, _lo_key(a.interval), _hi_key(a.interval)))
    return AnswerSet(Status.CONSISTENT, tuple(collected))


def point_certain(
    ontology: Ontology,
    facts: Sequence[Fact],
    atom: Atom,
    t: Union[TimePoint, int, Fraction],
) -> bool:
    """Whether the ground atom holds at time t in the least model."""
    if not atom.is_ground():
        raise ValueError("point_certain needs a ground atom")
    tp = as_timepoint(t)
    if not tp.is_finite:
        raise ValueError("point_certain needs a finite time point")
    evaluation = _RegionEvaluation(ontology, facts, alt=False)
    if evaluation.inconsistent:
        return True
    row = tuple(term.name for term in atom.args)
    vec = evaluation.vectors.get((atom.predicate, row))
    if vec is None:
        return False
    return vec[evaluation.grid.locate(tp.seconds)]
