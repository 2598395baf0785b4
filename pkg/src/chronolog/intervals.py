"""Exact interval arithmetic over dense time.

Time points are arbitrary-precision rationals (seconds since the epoch)
extended with two infinities.  Intervals carry independent open/closed flags
per endpoint; interval sets are kept coalesced so every member interval is
maximal.  Everything here is an immutable value and every operation is pure
and exact: no floats, no rounding, safe for concurrent use.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Union[int, Fraction]

_NEG, _FIN, _POS = -1, 0, 1


@functools.total_ordering
@dataclass(frozen=True, slots=True)
class TimePoint:
    """A point on the dense time axis: exact rational seconds or an infinity."""

    kind: int = _FIN
    seconds: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind == _FIN:
            if not isinstance(self.seconds, Fraction):
                object.__setattr__(self, "seconds", Fraction(self.seconds))
        elif self.seconds != 0:
            object.__setattr__(self, "seconds", Fraction(0))

    @staticmethod
    def finite(value: Rational) -> "TimePoint":
        return TimePoint(_FIN, Fraction(value))

    @property
    def is_finite(self) -> bool:
        return self.kind == _FIN

    def __lt__(self, other: "TimePoint") -> bool:
        return (self.kind, self.seconds) < (other.kind, other.seconds)

    def __add__(self, delta: Rational) -> "TimePoint":
        if self.kind != _FIN:
            return self
        return TimePoint(_FIN, self.seconds + Fraction(delta))

    def __sub__(self, delta: Rational) -> "TimePoint":
        if self.kind != _FIN:
            return self
        return TimePoint(_FIN, self.seconds - Fraction(delta))

    def __neg__(self) -> "TimePoint":
        if self.kind == _FIN:
            return TimePoint(_FIN, -self.seconds)
        return NEG_INF if self.kind == _POS else POS_INF

    def __str__(self) -> str:
        if self.kind == _NEG:
            return "-inf"
        if self.kind == _POS:
            return "+inf"
        return str(self.seconds)


NEG_INF = TimePoint(_NEG)
POS_INF = TimePoint(_POS)


def as_timepoint(value: Union[TimePoint, Rational]) -> TimePoint:
    if isinstance(value, TimePoint):
        return value
    return TimePoint.finite(value)


@dataclass(frozen=True, slots=True)
class Interval:
    """An interval on dense time with explicit endpoint strictness.

    Infinite endpoints are always stored open; the two representations of an
    unbounded end are identical values.
    """

    lo: TimePoint
    lo_closed: bool
    hi: TimePoint
    hi_closed: bool

    def __post_init__(self):
        if not self.lo.is_finite and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if not self.hi.is_finite and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)

    @staticmethod
    def make(lo, lo_closed: bool, hi, hi_closed: bool) -> "Interval":
        return Interval(as_timepoint(lo), lo_closed, as_timepoint(hi), hi_closed)

    @staticmethod
    def closed(lo, hi) -> "Interval":
        return Interval.make(lo, True, hi, True)

    @staticmethod
    def point(value) -> "Interval":
        return Interval.closed(value, value)

    @staticmethod
    def unbounded() -> "Interval":
        return Interval(NEG_INF, False, POS_INF, False)

    @property
    def lo_key(self):
        # Closed lower bounds start earlier than open ones at the same point.
        return (self.lo, 0 if self.lo_closed else 1)

    @property
    def hi_key(self):
        # Open upper bounds end earlier than closed ones at the same point.
        return (self.hi, 1 if self.hi_closed else 0)

    def is_empty(self) -> bool:
        if self.lo < self.hi:
            return False
        if self.lo == self.hi:
            return not (self.lo.is_finite and self.lo_closed and self.hi_closed)
        return True

    def contains(self, t: Union[TimePoint, Rational]) -> bool:
        t = as_timepoint(t)
        if t < self.lo or (t == self.lo and not self.lo_closed):
            return False
        if self.hi < t or (t == self.hi and not self.hi_closed):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo_key >= other.lo_key:
            lo, lo_closed = self.lo, self.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        if self.hi_key <= other.hi_key:
            hi, hi_closed = self.hi, self.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        return Interval(lo, lo_closed, hi, hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo},{self.hi}{right}"


@dataclass(frozen=True, slots=True)
class Window:
    """The range of a metric operator: distances t with t {>|>=} lo and t {<|<=} hi."""

    lo: Fraction
    lo_inclusive: bool
    hi: Fraction
    hi_inclusive: bool

    def __post_init__(self):
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", Fraction(self.lo))
        if not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", Fraction(self.hi))

    @property
    def is_consistent(self) -> bool:
        """True iff some distance satisfies both comparisons (and bounds are sane)."""
        if self.lo < 0 or self.hi < 0:
            return False
        if self.lo < self.hi:
            return True
        return self.lo == self.hi and self.lo_inclusive and self.hi_inclusive

    def __str__(self) -> str:
        left = "[" if self.lo_inclusive else "("
        right = "]" if self.hi_inclusive else ")"
        return f"{left}{self.lo},{self.hi}{right}"


def edge_ed(closed: bool, inclusive: bool) -> bool:
    """Result-bound table for shifting an interval endpoint through a window edge.

    The result bound is closed only when the source bound is closed and the
    window comparison is inclusive.  Applies to lower bounds (with ``inclusive``
    meaning >=) and, by symmetry, to upper bounds (``inclusive`` meaning <=).
    """
    return closed and inclusive


def edge_de(closed: bool, inclusive: bool) -> bool:
    """Published result-bound table for the box-in-body candidate interval.

    Closed exactly when the source bound's strictness matches the window
    comparison's: (open, strict) or (closed, inclusive).  Kept as the published
    reference table; see ``shrink_box_body`` for the bound rule the evaluator
    uses, which differs on the two mixed cases.
    """
    return closed == inclusive


def shift_box_head(interval: Interval, window: Window, future: bool) -> Interval:
    """Image of an interval under a box-headed rule.

    For the future direction this is the union over t in ``interval`` of
    {t' : t' - t in window}; the past direction is its time mirror.
    """
    if future:
        return Interval(
            interval.lo + window.lo,
            edge_ed(interval.lo_closed, window.lo_inclusive),
            interval.hi + window.hi,
            edge_ed(interval.hi_closed, window.hi_inclusive),
        )
    return Interval(
        interval.lo - window.hi,
        edge_ed(interval.lo_closed, window.hi_inclusive),
        interval.hi - window.lo,
        edge_ed(interval.hi_closed, window.lo_inclusive),
    )


def shrink_box_body(interval: Interval, window: Window, future: bool) -> Interval:
    """Set of points whose whole window image fits inside ``interval``.

    ``interval`` must be maximal (taken from a coalesced set).  The returned
    candidate is empty exactly when no translate of the window fits, so
    emptiness doubles as the fit test.  A result bound is closed unless the
    window image actually attains the corresponding endpoint (inclusive
    comparison) while the interval excludes it (open bound).
    """
    if future:
        return Interval(
            interval.lo - window.lo,
            interval.lo_closed or not window.lo_inclusive,
            interval.hi - window.hi,
            interval.hi_closed or not window.hi_inclusive,
        )
    return Interval(
        interval.lo + window.hi,
        interval.lo_closed or not window.hi_inclusive,
        interval.hi + window.lo,
        interval.hi_closed or not window.lo_inclusive,
    )


def _connected(left: Interval, right: Interval) -> bool:
    # Precondition: left.lo_key <= right.lo_key.
    if right.lo < left.hi:
        return True
    return (
        right.lo == left.hi
        and right.lo.is_finite
        and (left.hi_closed or right.lo_closed)
    )


def coalesce(items: Iterable[Interval]) -> "IntervalSet":
    """Canonical interval set covering exactly the union of the inputs.

    Touching intervals merge only when at least one of the facing bounds is
    closed (otherwise the shared point is uncovered).
    """
    pending = sorted(
        (iv for iv in items if not iv.is_empty()),
        key=lambda iv: (iv.lo_key, iv.hi_key),
    )
    merged: list[Interval] = []
    for iv in pending:
        if merged and _connected(merged[-1], iv):
            last = merged[-1]
            if iv.hi_key > last.hi_key:
                merged[-1] = Interval(last.lo, last.lo_closed, iv.hi, iv.hi_closed)
        else:
            merged.append(iv)
    return IntervalSet(tuple(merged))


@dataclass(frozen=True, slots=True)
class IntervalSet:
    """Coalesced, sorted union of nonempty intervals; a unique representation.

    Construct via :func:`coalesce`; the constructor trusts its input.
    """

    intervals: tuple[Interval, ...] = ()

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def contains_point(self, t: Union[TimePoint, Rational]) -> bool:
        t = as_timepoint(t)
        return any(iv.contains(t) for iv in self.intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Interval] = []
        i = j = 0
        mine, theirs = self.intervals, other.intervals
        while i < len(mine) and j < len(theirs):
            piece = mine[i].intersect(theirs[j])
            if not piece.is_empty():
                out.append(piece)
            if mine[i].hi_key <= theirs[j].hi_key:
                i += 1
            else:
                j += 1
        return coalesce(out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return coalesce(self.intervals + other.intervals)

    def __str__(self) -> str:
        return "{" + ", ".join(str(iv) for iv in self.intervals) + "}"


EMPTY_SET = IntervalSet()
