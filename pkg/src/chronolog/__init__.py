"""Ontology-mediated query answering over timestamped logs.

Rules are metric-temporal Horn clauses over dense time (box operators only in
heads, no recursion); data are interval-stamped ground atoms.  The evaluator
computes per-predicate interval tables bottom-up; an independent naive
evaluator re-derives answers straight from the semantics for cross-checking.
"""

from .engine import Answer, AnswerSet, RunResult, Status, Table, answer, run
from .errors import (
    ChronologError,
    CyclicProgramError,
    NormalizationError,
    OracleSizeError,
    ParseError,
    ValidationError,
)
from .intervals import (
    EMPTY_SET,
    NEG_INF,
    POS_INF,
    Interval,
    IntervalSet,
    TimePoint,
    Window,
    coalesce,
    edge_de,
    edge_ed,
    shift_box_head,
    shrink_box_body,
)
from .model import (
    Atom,
    Comparison,
    Constant,
    Fact,
    Modal,
    Ontology,
    Query,
    Rule,
    TemporalOp,
    Variable,
    classify_predicates,
    validate,
)
from .naive import naive_answer, naive_closure, naive_evaluate, point_certain
from .normalform import NormalizedOntology, normalize, strip_modal_comparisons
from .parsing import (
    format_fact,
    format_facts,
    format_interval,
    format_ontology,
    format_query,
    format_rule,
    parse_data,
    parse_interval,
    parse_ontology,
    parse_query,
    parse_timepoint,
)
from .strata import build_graph, check_nonrecursive, to_dot

__version__ = "0.1.0"
