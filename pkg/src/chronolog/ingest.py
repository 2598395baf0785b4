"""Weather-log CSV ingestion: turning measurement rows into interval facts.

Measurements arrive as timestamped samples per station; a reading is taken to
describe the span since the previous sample of the same station, so a row
pair (prev, curr) satisfying an extraction condition yields a fact over
(t_prev, t_curr] by default (the shape is configurable).  Threshold
conditions look at the current row; lag conditions compare the current row
against the previous one.  Station metadata becomes global location facts.

The ingestion config is a small line-based key/value file:

    station_column = ID
    time_column = TIME
    predicate Precipitation: P01I > lag
    predicate HurricaneForceWind: SKNT > 118
    predicate TempAbove24: TMP > 24 shape (]

Supported comparison operators: >, >=, <, <=; the right-hand side is either
a rational threshold or the word "lag".
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import ParseError
from .intervals import Interval, TimePoint
from .model import Atom, Constant, Fact
from .parsing import parse_timepoint

_OPS = {
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
}

_RULE_RE = re.compile(
    r"predicate\s+(?P<pred>[A-Za-z_][A-Za-z0-9_]*)\s*:\s*"
    r"(?P<col>\S+)\s*(?P<op>>=|<=|>|<)\s*(?P<rhs>\S+)"
    r"(?:\s+shape\s+(?P<shape>[\[(][\])]))?\s*$"
)


@dataclass(frozen=True)
class ExtractionRule:
    predicate: str
    column: str
    op: str
    threshold: Optional[Fraction]  # None when comparing against the lagged value
    lo_closed: bool = False
    hi_closed: bool = True

    @property
    def vs_lag(self) -> bool:
        return self.threshold is None


@dataclass(frozen=True)
class IngestionConfig:
    station_column: str
    time_column: str
    rules: tuple[ExtractionRule, ...]


def parse_config(text: str) -> IngestionConfig:
    station = time_col = None
    rules: list[ExtractionRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%") or line.startswith("#"):
            continue
        if line.startswith("predicate"):
            match = _RULE_RE.match(line)
            if match is None:
                raise ParseError(f"malformed extraction rule: {line!r}", lineno)
            rhs = match.group("rhs")
            threshold = None
            if rhs != "lag":
                try:
                    threshold = Fraction(rhs)
                except ValueError:
                    raise ParseError(
                        f"threshold must be rational or 'lag': {rhs!r}", lineno
                    ) from None
            shape = match.group("shape") or "(]"
            rules.append(
                ExtractionRule(
                    match.group("pred"),
                    match.group("col"),
                    match.group("op"),
                    threshold,
                    lo_closed=shape[0] == "[",
                    hi_closed=shape[1] == "]",
                )
            )
            continue
        if "=" in line:
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "station_column":
                station = value
                continue
            if key == "time_column":
                time_col = value
                continue
        raise ParseError(f"unrecognized config line: {line!r}", lineno)
    if station is None or time_col is None:
        raise ParseError("config must set station_column and time_column")
    if not rules:
        raise ParseError("config defines no extraction rules")
    return IngestionConfig(station, time_col, tuple(rules))


@dataclass
class IngestionReport:
    rows: int = 0
    skipped: int = 0
    facts: int = 0
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.skipped += 1
        if len(self.warnings) < 20:
            self.warnings.append(message)


def _open_rows(source: Union[str, TextIO]) -> csv.DictReader:
    if isinstance(source, str):
        source = io.StringIO(source)
    return csv.DictReader(source)


def ingest_weather_csv(
    source: Union[str, TextIO],
    config: IngestionConfig,
    report: Optional[IngestionReport] = None,
) -> list[Fact]:
    """Extract interval facts from a measurement CSV.

    Rows are grouped by station and ordered by timestamp; the first row of a
    station emits nothing (there is no preceding sample).  Malformed rows are
    skipped, counted, and reported.  The result is deduplicated and sorted, so
    it does not depend on the input row order.
    """
    report = report if report is not None else IngestionReport()
    reader = _open_rows(source)
    header = reader.fieldnames or []
    required = {config.station_column, config.time_column}
    required |= {rule.column for rule in config.rules}
    missing = sorted(required - set(header))
    if missing:
        raise ParseError(f"CSV is missing columns: {', '.join(missing)}")

    per_station: dict[str, list[tuple[TimePoint, dict]]] = {}
    for row in reader:
        report.rows += 1
        raw_station = (row.get(config.station_column) or "").strip()
        raw_time = (row.get(config.time_column) or "").strip()
        if not raw_station or not raw_time:
            report.warn(f"row {report.rows}: missing station or timestamp")
            continue
        try:
            stamp = parse_timepoint(raw_time)
        except ParseError:
            report.warn(f"row {report.rows}: bad timestamp {raw_time!r}")
            continue
        per_station.setdefault(raw_station.lower(), []).append((stamp, row))

    def value_of(row: dict, column: str) -> Optional[Fraction]:
        raw = (row.get(column) or "").strip()
        if not raw:
            return None
        try:
            return Fraction(raw)
        except ValueError:
            return None

    emitted: set[Fact] = set()
    for station, samples in per_station.items():
        samples.sort(key=lambda pair: pair[0])
        for (prev_t, prev_row), (curr_t, curr_row) in zip(samples, samples[1:]):
            if not prev_t < curr_t:
                report.warn(f"station {station}: duplicate timestamp {curr_t}")
                continue
            for rule in config.rules:
                current = value_of(curr_row, rule.column)
                if current is None:
                    report.warn(
                        f"station {station}: bad {rule.column} value at {curr_t}"
                    )
                    continue
                if rule.vs_lag:
                    previous = value_of(prev_row, rule.column)
                    if previous is None:
                        continue
                    holds = _OPS[rule.op](current, previous)
                else:
                    holds = _OPS[rule.op](current, rule.threshold)
                if holds:
                    emitted.add(
                        Fact(
                            Atom(rule.predicate, (Constant(station),)),
                            Interval(
                                prev_t, rule.lo_closed, curr_t, rule.hi_closed
                            ),
                        )
                    )
    facts = sorted(
        emitted,
        key=lambda f: (
            f.atom.predicate,
            tuple(t.name for t in f.atom.args),
            f.interval.lo_key,
            f.interval.hi_key,
        ),
    )
    report.facts = len(facts)
    return facts


def ingest_metadata_csv(
    source: Union[str, TextIO], predicate: str = "LocationOf"
) -> list[Fact]:
    """County/station rows become global location facts over (-inf, +inf)."""
    reader = _open_rows(source)
    header = reader.fieldnames or []
    missing = sorted({"ID", "COUNTY"} - set(header))
    if missing:
        raise ParseError(f"metadata CSV is missing columns: {', '.join(missing)}")
    seen: set[tuple[str, str]] = set()
    for row in reader:
        station = (row.get("ID") or "").strip().lower()
        county = (row.get("COUNTY") or "").strip().lower()
        if station and county:
            seen.add((county, station))
    return [
        Fact(
            Atom(predicate, (Constant(county), Constant(station))),
            Interval.unbounded(),
        )
        for county, station in sorted(seen)
    ]
