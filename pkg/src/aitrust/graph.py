"""Layered directed graphs of requirements, aspects and components.

A :class:`TrustGraph` is immutable. Nodes and edges are kept in canonical
(lexicographic) order so that every downstream computation is reproducible
regardless of the order in which the model was declared. Construction never
fails on semantic problems; :func:`validate_graph` reports them as data.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

__all__ = [
    "Layer",
    "Orientation",
    "Node",
    "TrustGraph",
    "Violation",
    "NodeNotFoundError",
    "validate_graph",
    "out_degree",
    "in_neighbors",
    "reachable_from",
    "reverse",
]

TOKEN_RE = re.compile(r"^[^\s\"#]+$")


class NodeNotFoundError(KeyError):
    """Raised when a query names a node the graph does not declare."""

    def __init__(self, token: str):
        super().__init__(token)
        self.token = token

    def __str__(self) -> str:
        return f"node not found: {self.token!r}"


class Layer(enum.Enum):
    REQUIREMENT = "requirement"
    ASPECT = "aspect"
    COMPONENT = "component"
    UNTYPED = "untyped"

    @property
    def depth(self) -> int | None:
        """Position in the general-to-specific hierarchy (None if untyped)."""
        return _DEPTH.get(self)


_DEPTH = {Layer.REQUIREMENT: 0, Layer.ASPECT: 1, Layer.COMPONENT: 2}


class Orientation(enum.Enum):
    TOP_DOWN = "top-down"
    BOTTOM_UP = "bottom-up"
    FREE = "free"

    def flipped(self) -> "Orientation":
        if self is Orientation.TOP_DOWN:
            return Orientation.BOTTOM_UP
        if self is Orientation.BOTTOM_UP:
            return Orientation.TOP_DOWN
        return self


@dataclass(frozen=True)
class Node:
    token: str
    layer: Layer = Layer.UNTYPED
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.layer, Layer):
            object.__setattr__(self, "layer", Layer(self.layer))


@dataclass(frozen=True)
class TrustGraph:
    """Directed reliance graph: an edge ``(a, b)`` means *a relies on b*.

    ``nodes`` may be given as :class:`Node` objects or ``(token, layer)`` /
    ``(token, layer, label)`` tuples; ``edges`` as ``(source, target)`` pairs.
    """

    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str], ...] = ()
    orientation: Orientation = Orientation.FREE
    title: str | None = None
    requirement: str | None = None

    def __post_init__(self):
        nodes = tuple(sorted((_as_node(n) for n in self.nodes), key=lambda n: n.token))
        edges = tuple(sorted((str(s), str(t)) for s, t in self.edges))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        if not isinstance(self.orientation, Orientation):
            object.__setattr__(self, "orientation", Orientation(self.orientation))

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, token) -> bool:
        return token in self.index

    def __repr__(self) -> str:
        return (
            f"TrustGraph({len(self.nodes)} nodes, {len(self.edges)} edges, "
            f"{self.orientation.value})"
        )

    @cached_property
    def tokens(self) -> tuple[str, ...]:
        return tuple(n.token for n in self.nodes)

    @cached_property
    def index(self) -> dict[str, int]:
        """Token -> position in :attr:`tokens` (first occurrence wins)."""
        idx: dict[str, int] = {}
        for i, tok in enumerate(self.tokens):
            idx.setdefault(tok, i)
        return idx

    @cached_property
    def _layers(self) -> dict[str, Layer]:
        return {n.token: n.layer for n in reversed(self.nodes)}

    @cached_property
    def _successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {t: [] for t in self.index}
        for s, t in self.edges:
            if s in out:
                out[s].append(t)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _predecessors(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, list[str]] = {t: [] for t in self.index}
        for s, t in self.edges:
            if t in inc:
                inc[t].append(s)
        return {k: tuple(sorted(v)) for k, v in inc.items()}

    def node(self, token: str) -> Node:
        try:
            return self.nodes[self.index[token]]
        except KeyError:
            raise NodeNotFoundError(token) from None

    def layer(self, token: str) -> Layer:
        try:
            return self._layers[token]
        except KeyError:
            raise NodeNotFoundError(token) from None

    def successors(self, token: str) -> tuple[str, ...]:
        try:
            return self._successors[token]
        except KeyError:
            raise NodeNotFoundError(token) from None

    def predecessors(self, token: str) -> tuple[str, ...]:
        try:
            return self._predecessors[token]
        except KeyError:
            raise NodeNotFoundError(token) from None

    def nodes_in(self, layer: Layer) -> tuple[str, ...]:
        return tuple(n.token for n in self.nodes if n.layer is layer)

    def replace(self, **changes) -> "TrustGraph":
        fields = dict(
            nodes=self.nodes,
            edges=self.edges,
            orientation=self.orientation,
            title=self.title,
            requirement=self.requirement,
        )
        fields.update(changes)
        return TrustGraph(**fields)

    def relabel(self, mapping: Mapping[str, str]) -> "TrustGraph":
        """Return a copy with node tokens renamed through ``mapping``."""

        def m(tok):
            return mapping.get(tok, tok)

        return self.replace(
            nodes=[Node(m(n.token), n.layer, n.label) for n in self.nodes],
            edges=[(m(s), m(t)) for s, t in self.edges],
        )


def _as_node(obj) -> Node:
    if isinstance(obj, Node):
        return obj
    if isinstance(obj, str):
        return Node(obj)
    return Node(*obj)


@dataclass(frozen=True)
class Violation:
    """One problem found by :func:`validate_graph`."""

    kind: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


def _orientation_ok(orientation: Orientation, src: Layer, dst: Layer) -> bool:
    if orientation is Orientation.FREE:
        return True
    a, b = src.depth, dst.depth
    if a is None or b is None or a == b:
        return True
    if orientation is Orientation.TOP_DOWN:
        return a < b
    return a > b


def validate_graph(graph: TrustGraph) -> list[Violation]:
    """Return every structural violation in ``graph``; empty means valid."""
    out: list[Violation] = []
    if not graph.nodes:
        out.append(Violation("empty", "graph", "graph must declare at least one node"))

    seen: set[str] = set()
    for node in graph.nodes:
        tok = node.token
        if not tok or not TOKEN_RE.match(tok):
            out.append(Violation("token", f"node {tok!r}", "invalid node token"))
        if tok in seen:
            out.append(Violation("duplicate-node", f"node {tok}", "duplicate node token"))
        seen.add(tok)
        if node.layer is Layer.UNTYPED and graph.orientation is not Orientation.FREE:
            out.append(
                Violation(
                    "layer",
                    f"node {tok}",
                    f"untyped node not allowed in a {graph.orientation.value} graph",
                )
            )

    prev = None
    for s, t in graph.edges:
        where = f"edge {s} -> {t}"
        if (s, t) == prev:
            out.append(Violation("duplicate-edge", where, "duplicate edge"))
            continue
        prev = (s, t)
        missing = [x for x in (s, t) if x not in seen]
        if missing:
            for x in missing:
                out.append(Violation("unknown-endpoint", where, f"unknown endpoint {x!r}"))
            continue
        if s == t:
            out.append(Violation("self-loop", where, "self-loops are not allowed"))
            continue
        ls, lt = graph.layer(s), graph.layer(t)
        if not _orientation_ok(graph.orientation, ls, lt):
            out.append(
                Violation(
                    "orientation",
                    where,
                    f"{ls.value} -> {lt.value} edge violates {graph.orientation.value} orientation",
                )
            )
    return out


def out_degree(graph: TrustGraph, node: str) -> int:
    return len(graph.successors(node))


def in_neighbors(graph: TrustGraph, node: str) -> list[str]:
    """Sources of edges into ``node``, sorted by token."""
    return list(graph.predecessors(node))


def reachable_from(graph: TrustGraph, seeds: Iterable[str]) -> set[str]:
    """Seeds plus every node reachable from one of them along edges."""
    seeds = set(seeds)
    for s in seeds:
        if s not in graph:
            raise NodeNotFoundError(s)
    seen = set(seeds)
    queue = deque(sorted(seeds))
    while queue:
        for nxt in graph.successors(queue.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def reverse(graph: TrustGraph) -> TrustGraph:
    """Flip every edge and swap top-down/bottom-up orientation."""
    return graph.replace(
        edges=[(t, s) for s, t in graph.edges],
        orientation=graph.orientation.flipped(),
    )
