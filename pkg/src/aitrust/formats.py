"""Text formats: the graph model file, score CSV, report JSON and DOT.

Graph files are line oriented::

    # comments run to end of line
    format: 1
    orientation: top-down          # top-down | bottom-up | free
    title: "Technical Robustness & Safety"
    requirement: technical-robustness-safety

    [nodes]
    A1 aspect "Resilience to Attack & Security"
    M1 component

    [edges]
    A1 -> M1
"""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .graph import Layer, Node, Orientation, TrustGraph, Violation, validate_graph

__all__ = [
    "FORMAT_VERSION",
    "GraphSyntaxError",
    "GraphValidationError",
    "parse_graph_text",
    "emit_graph_text",
    "emit_scores_csv",
    "parse_scores_csv",
    "emit_report_json",
    "emit_dot",
]

FORMAT_VERSION = 1
HEADER_KEYS = ("format", "orientation", "title", "requirement")


class GraphSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str, source: str | None = None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.message = message
        self.source = source

    def __str__(self) -> str:
        where = f"{self.source}:" if self.source else "line "
        return f"{where}{self.line}:{self.column}: {self.message}"


class GraphValidationError(ValueError):
    """The document parsed, but the graph it describes is not valid."""

    def __init__(self, violations: list[Violation], graph: TrustGraph):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations
        self.graph = graph


def _split(text: str, lineno: int) -> list[tuple[str, int, bool]]:
    """Split a line into (word, column, was_quoted), dropping comments."""
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "#":
            break
        elif ch == '"':
            start, i, buf = i, i + 1, []
            while True:
                if i >= n:
                    raise GraphSyntaxError(lineno, start + 1, "unterminated string")
                c = text[i]
                if c == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                elif c == '"':
                    i += 1
                    break
                else:
                    buf.append(c)
                    i += 1
            out.append(("".join(buf), start + 1, True))
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in '#"':
                i += 1
            out.append((text[start:i], start + 1, False))
    return out


def parse_graph_text(text: str, *, validate: bool = True, source: str | None = None) -> TrustGraph:
    """Parse a graph document.

    Raises :class:`GraphSyntaxError` for malformed input and, when
    ``validate`` is true, :class:`GraphValidationError` if the resulting
    graph breaks a structural rule.
    """
    header: dict[str, str] = {}
    nodes: list[Node] = []
    edges: list[tuple[str, str]] = []
    declared: dict[str, int] = {}
    section = None
    seen_sections: set[str] = set()

    def fail(line, col, msg):
        raise GraphSyntaxError(line, col, msg, source)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("[") and not stripped.startswith("[#"):
            name = stripped.split("#", 1)[0].strip()
            col = raw.index("[") + 1
            if name not in ("[nodes]", "[edges]"):
                fail(lineno, col, f"unknown section {name!r}")
            if name in seen_sections:
                fail(lineno, col, f"section {name} repeated")
            seen_sections.add(name)
            section = name[1:-1]
            continue
        try:
            words = _split(raw, lineno)
        except GraphSyntaxError as exc:
            exc.source = source
            raise
        if not words:
            continue

        if section is None:
            key, col, _ = words[0]
            if not key.endswith(":"):
                fail(lineno, col, "expected 'key: value' header line")
            key = key[:-1]
            if key not in HEADER_KEYS:
                fail(lineno, col, f"unknown header key {key!r}")
            if key in header:
                fail(lineno, col, f"header key {key!r} repeated")
            if len(words) != 2:
                fail(lineno, col, f"header {key!r} takes exactly one value")
            header[key] = words[1][0]
        elif section == "nodes":
            if len(words) not in (2, 3):
                fail(lineno, words[0][1], "expected 'TOKEN LAYER [\"label\"]'")
            (tok, tcol, tq), (layer, lcol, _) = words[0], words[1]
            if tq:
                fail(lineno, tcol, "node token must not be quoted")
            if tok in declared:
                fail(lineno, tcol, f"duplicate node {tok!r} (first declared on line {declared[tok]})")
            try:
                lay = Layer(layer.lower())
            except ValueError:
                fail(lineno, lcol, f"unknown layer {layer!r}")
            label = None
            if len(words) == 3:
                label, col, quoted = words[2]
                if not quoted:
                    fail(lineno, col, "node label must be quoted")
            declared[tok] = lineno
            nodes.append(Node(tok, lay, label))
        else:
            if len(words) != 3 or words[1][0] != "->" or words[1][2]:
                col = words[1][1] if len(words) > 1 else words[0][1]
                fail(lineno, col, "malformed edge, expected 'SOURCE -> TARGET'")
            edges.append((words[0][0], words[2][0]))

    version = header.get("format", str(FORMAT_VERSION))
    if version != str(FORMAT_VERSION):
        fail(1, 1, f"unsupported format version {version!r}")
    if "orientation" not in header:
        fail(1, 1, "missing 'orientation:' header")
    try:
        orientation = Orientation(header["orientation"].lower())
    except ValueError:
        fail(1, 1, f"unknown orientation {header['orientation']!r}")

    graph = TrustGraph(
        nodes, edges, orientation, title=header.get("title"), requirement=header.get("requirement")
    )
    if validate:
        violations = validate_graph(graph)
        if violations:
            raise GraphValidationError(violations, graph)
    return graph


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_graph_text(graph: TrustGraph) -> str:
    """Canonical document: sorted nodes and edges, single-space separators."""
    lines = [f"format: {FORMAT_VERSION}", f"orientation: {graph.orientation.value}"]
    if graph.title is not None:
        lines.append(f"title: {_quote(graph.title)}")
    if graph.requirement is not None:
        lines.append(f"requirement: {_quote(graph.requirement)}")
    lines += ["", "[nodes]"]
    for node in graph.nodes:
        line = f"{node.token} {node.layer.value}"
        if node.label is not None:
            line += " " + _quote(node.label)
        lines.append(line)
    lines += ["", "[edges]"]
    lines += [f"{s} -> {t}" for s, t in graph.edges]
    return "\n".join(lines) + "\n"


def _shared_domain(vectors: Sequence[tuple[str, Mapping[str, float]]]) -> list[str]:
    if not vectors:
        raise ValueError("nothing to emit")
    domain = set(vectors[0][1])
    for label, vec in vectors[1:]:
        if set(vec) != domain:
            raise ValueError(f"vector {label!r} covers a different node set")
    return sorted(domain)


def emit_scores_csv(vectors: Sequence[tuple[str, Mapping[str, float]]]) -> str:
    tokens = _shared_domain(vectors)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", *(label for label, _ in vectors)])
    for tok in tokens:
        writer.writerow([tok, *(f"{vec[tok]:.4f}" for _, vec in vectors)])
    return buf.getvalue()


def parse_scores_csv(text: str) -> list[tuple[str, dict[str, float]]]:
    """Inverse of :func:`emit_scores_csv` (values come back as floats)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:1] != ["node"]:
        raise ValueError("score CSV must start with a 'node' header column")
    labels = rows[0][1:]
    columns: list[tuple[str, dict[str, float]]] = [(lab, {}) for lab in labels]
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != len(labels) + 1:
            raise ValueError(f"row for {row[0]!r} has {len(row) - 1} values, expected {len(labels)}")
        for (_, col), cell in zip(columns, row[1:]):
            col[row[0]] = float(cell)
    return columns


def emit_report_json(report) -> str:
    """Serialize an :class:`~aitrust.assessment.AssessmentReport`."""
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(graph: TrustGraph, scores: Mapping[str, float] | None = None) -> str:
    """Graphviz digraph with one rank per layer.

    Requirements sit on the top rank of a top-down (or free) graph and on the
    bottom rank of a bottom-up graph.
    """
    if scores is not None and set(scores) != set(graph.tokens):
        raise ValueError("scores must cover exactly the graph's nodes")
    order = [Layer.REQUIREMENT, Layer.ASPECT, Layer.COMPONENT]
    if graph.orientation is Orientation.BOTTOM_UP:
        order.reverse()
    rank_kind = {order[0]: "min", order[1]: "same", order[2]: "max"}

    name = graph.title or "trust"
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=TB;", "  node [shape=box];"]
    for layer in [*order, Layer.UNTYPED]:
        members = graph.nodes_in(layer)
        if not members:
            continue
        lines.append(f"  subgraph {_dot_id('layer_' + layer.value)} {{")
        if layer is not Layer.UNTYPED:
            lines.append(f"    rank={rank_kind[layer]};")
        for tok in members:
            label = tok if scores is None else f"{tok}\\n{scores[tok]:.4f}"
            lines.append(f"    {_dot_id(tok)} [label=\"{label}\"];")
        lines.append("  }")
    for s, t in graph.edges:
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
