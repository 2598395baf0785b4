"""Predicate dependency analysis: recursion rejection and evaluation order."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import CyclicProgramError
from .model import Ontology, Rule, head_predicate, literal_atoms
from .normalform import (
    NormalizedOntology,
    NormalRule,
    normal_body_predicates,
    normal_head_predicate,
)


@dataclass(frozen=True)
class DependencyGraph:
    """Edges point from a rule-head predicate to each of its body predicates."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def dependencies(self, name: str) -> tuple[str, ...]:
        return tuple(sorted(b for h, b in self.edges if h == name))


def _rule_deps(rule: Union[Rule, NormalRule]) -> tuple[Optional[str], tuple[str, ...]]:
    if isinstance(rule, Rule):
        head = head_predicate(rule)
        bodies = tuple(
            atom.predicate for lit in rule.body for atom in literal_atoms(lit)
        )
        return head, bodies
    return normal_head_predicate(rule), normal_body_predicates(rule)


def build_graph(program: Union[Ontology, NormalizedOntology]) -> DependencyGraph:
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for rule in program.rules:
        head, bodies = _rule_deps(rule)
        nodes.update(bodies)
        if head is not None:
            nodes.add(head)
            edges.update((head, b) for b in bodies)
    return DependencyGraph(tuple(sorted(nodes)), frozenset(edges))


def _find_cycle(graph: DependencyGraph, candidates: set[str]) -> list[str]:
    adjacency: dict[str, list[str]] = {n: [] for n in candidates}
    for head, body in sorted(graph.edges):
        if head in candidates and body in candidates:
            adjacency[head].append(body)

    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> Optional[list[str]]:
        color[node] = 1
        stack.append(node)
        for nxt in adjacency[node]:
            if color.get(nxt, 0) == 1:
                return stack[stack.index(nxt) :] + [nxt]
            if color.get(nxt, 0) == 0:
                found = visit(nxt)
                if found is not None:
                    return found
        stack.pop()
        color[node] = 2
        return None

    for node in sorted(candidates):
        if color.get(node, 0) == 0:
            found = visit(node)
            if found is not None:
                return found
    raise AssertionError("stuck topological sort without a cycle")


def check_nonrecursive(graph: DependencyGraph) -> list[str]:
    """Topological evaluation order: every body predicate before its heads.

    Deterministic (name-ordered tie-break).  Raises CyclicProgramError with a
    concrete witness cycle when the dependency relation is reflexive under
    transitive closure.
    """
    remaining: dict[str, int] = {n: 0 for n in graph.nodes}
    dependents: dict[str, list[str]] = {n: [] for n in graph.nodes}
    for head, body in graph.edges:
        remaining[head] += 1
        dependents[body].append(head)

    ready = [n for n, count in remaining.items() if count == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for head in sorted(dependents[node]):
            remaining[head] -= 1
            if remaining[head] == 0:
                heapq.heappush(ready, head)
    if len(order) != len(graph.nodes):
        leftovers = {n for n, count in remaining.items() if count > 0}
        raise CyclicProgramError(_find_cycle(graph, leftovers))
    return order


def to_dot(graph: DependencyGraph) -> str:
    lines = ["digraph dependencies {"]
    for node in graph.nodes:
        lines.append(f'  "{node}";')
    for head, body in sorted(graph.edges):
        lines.append(f'  "{head}" -> "{body}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
