"""Exception types shared across the package."""

from __future__ import annotations


class ChronologError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ChronologError):
    """Syntax or lexical error in ontology, data, query, or literal text."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class ValidationError(ChronologError):
    """Raised by pipeline entry points when a validation report is nonempty."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class CyclicProgramError(ChronologError):
    """The rule dependency relation has a cycle; evaluation is undefined."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("recursive program: " + " -> ".join(self.cycle))


class NormalizationError(ChronologError):
    """The ontology cannot be brought to normal form (e.g. diamond in a head)."""


class OracleSizeError(ChronologError):
    """The naive reference evaluator was handed an input beyond its guard."""
