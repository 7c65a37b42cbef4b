"""ALTAI requirements and the two bundled scenario models.

Scenario edges are data files transcribed once and checked in; the published
score columns are stored exactly as printed (four decimals).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .formats import parse_graph_text, parse_scores_csv
from .graph import TrustGraph, reachable_from

__all__ = [
    "AltaiRequirement",
    "PublishedColumn",
    "ScenarioFixture",
    "altai_catalog",
    "find_requirement",
    "scenario_graph",
    "check_transcription",
    "SCENARIO_IDS",
]


@dataclass(frozen=True)
class AltaiRequirement:
    key: str
    title: str
    description: str
    aspects: tuple[str, ...]
    meta_analysis: str


_CATALOG = (
    AltaiRequirement(
        "human-agency-oversight",
        "Human Agency & Oversight",
        "AI systems should support human autonomy and decision making, respect "
        "fundamental rights and remain subject to meaningful human supervision.",
        ("Fundamental Rights", "Human Agency", "Human Oversight"),
        "Human Control of Technology / Autonomy",
    ),
    AltaiRequirement(
        "technical-robustness-safety",
        "Technical Robustness & Safety",
        "AI systems should be developed with a preventive approach to risk, behave "
        "reliably as intended and minimise unintentional or unexpected harm.",
        (
            "Resilience to Attack & Security",
            "Fall Back Plan & General Safety",
            "Accuracy",
            "Reliability & Reproducibility",
        ),
        "Safety/Security / Non-Maleficence",
    ),
    AltaiRequirement(
        "privacy-data-governance",
        "Privacy & Data Governance",
        "Personal data must be protected and the data used by the system governed "
        "for quality, integrity, relevance and controlled access.",
        ("Privacy & Data Protection", "Quality & Integrity of Data", "Access to Data"),
        "Privacy",
    ),
    AltaiRequirement(
        "transparency",
        "Transparency",
        "The data, the system and the business model around it should be "
        "traceable, explainable and openly communicated.",
        ("Traceability", "Explainability", "Communication"),
        "Transparency / Explainability",
    ),
    AltaiRequirement(
        "diversity-non-discrimination-fairness",
        "Diversity, Non-Discrimination & Fairness",
        "AI systems should avoid unfair bias, be accessible to everyone and involve "
        "the stakeholders they affect.",
        (
            "Avoidance of Unfair Bias",
            "Accessibility & Universal Design",
            "Stakeholder Participation",
        ),
        "Fairness / Justice",
    ),
    AltaiRequirement(
        "societal-environmental-wellbeing",
        "Societal & Environmental Wellbeing",
        "AI systems should benefit society and the environment, now and for future "
        "generations, and support democratic processes.",
        (
            "Sustainable & Environmentally Friendly AI",
            "Social Impact",
            "Society & Democracy",
        ),
        "Humanity / Beneficence / Sustainability",
    ),
    AltaiRequirement(
        "accountability",
        "Accountability",
        "Mechanisms must exist that assign responsibility for AI systems and their "
        "outcomes, allow independent audit and provide redress.",
        (
            "Auditability",
            "Minimisation & Reporting of Negative Impacts",
            "Trade-offs",
            "Redress",
        ),
        "Accountability / Explicability",
    ),
)


def altai_catalog() -> list[AltaiRequirement]:
    """The seven ALTAI requirements, in their canonical order."""
    return list(_CATALOG)


def find_requirement(name: str) -> AltaiRequirement:
    """Look a requirement up by key or (case-insensitive) title."""
    wanted = name.strip().lower()
    for req in _CATALOG:
        if wanted in (req.key, req.title.lower()):
            return req
    raise KeyError(f"unknown requirement {name!r}; known keys: {', '.join(r.key for r in _CATALOG)}")


@dataclass(frozen=True)
class PublishedColumn:
    label: str
    seeds: tuple[str, ...] | None  # None for the PageRank column
    scores: dict[str, float]

    @property
    def is_pagerank(self) -> bool:
        return self.seeds is None


@dataclass(frozen=True)
class ScenarioFixture:
    id: str
    graph: TrustGraph
    published_scores: tuple[PublishedColumn, ...]
    alpha: float
    notes: str
    # (column label, node) cells known to disagree with the printed algorithm
    anomalies: tuple[tuple[str, str], ...] = ()

    def column(self, label: str) -> PublishedColumn:
        for col in self.published_scores:
            if col.label == label:
                return col
        raise KeyError(label)

    @property
    def trustrank_columns(self) -> tuple[PublishedColumn, ...]:
        return tuple(c for c in self.published_scores if not c.is_pagerank)


_NOTES = {
    "robustness-topdown": (
        "Seventeen nodes (A1-A4, M1-M13), top-down. Edges were recovered from the "
        "published score table: every column is reproduced by a unique edge set "
        "up to swapping M1 and M3, which score identically in every column (the "
        "edge into M4 is stored as M3 -> M4). At alpha = 0.85, pagerank() matches "
        "the PageRank column to within 7e-5. The TrustRank columns are reproduced "
        "to within 1e-4 by trustrank(..., normalize='final'); the default "
        "per-iteration normalization gives the same zero pattern but different "
        "values."
    ),
    "transparency-bottomup": (
        "Fourteen nodes (A1-A3, M1-M11), bottom-up. Edges recovered from the "
        "published score table; {M1, M8} and {M2, M6} score identically in every "
        "column, so their out-edges admit equivalent rewirings. All TrustRank "
        "columns are reproduced to within 1e-4 by trustrank(..., normalize="
        "'final') and require the edge M10 -> M9. The PageRank column matches "
        "(within 1e-4 at alpha = 0.85) only with that edge removed, so its M9 row "
        "and its neighbours are not reproducible from this graph. In column "
        "TrustRank{A1,A2,A3} the seed A3 is printed as 0, which no seeded "
        "TrustRank can produce; the column's other cells imply A3 = 0.2597."
    ),
}

_ANOMALIES = {
    "transparency-bottomup": (("TrustRank{A1,A2,A3}", "A3"),),
}

_ALPHA = {"robustness-topdown": 0.85, "transparency-bottomup": 0.85}

SCENARIO_IDS = tuple(sorted(_NOTES))

_LABEL_RE = re.compile(r"^TrustRank\{(.*)\}$")


def _column_seeds(label: str, graph: TrustGraph) -> tuple[str, ...] | None:
    if label == "PageRank":
        return None
    m = _LABEL_RE.match(label)
    if not m:
        raise ValueError(f"unrecognised score column {label!r}")
    if m.group(1) == "All Nodes":
        return graph.tokens
    return tuple(s.strip() for s in m.group(1).split(","))


def _read(name: str) -> str:
    return resources.files("aitrust").joinpath("data", name).read_text(encoding="utf-8")


def scenario_graph(scenario_id: str) -> ScenarioFixture:
    """Load a bundled scenario: its graph plus the published score columns."""
    if scenario_id not in _NOTES:
        raise KeyError(
            f"unknown scenario {scenario_id!r}; valid ids: {', '.join(SCENARIO_IDS)}"
        )
    graph = parse_graph_text(_read(f"{scenario_id}.graph"), source=f"{scenario_id}.graph")
    columns = tuple(
        PublishedColumn(label, _column_seeds(label, graph), scores)
        for label, scores in parse_scores_csv(_read(f"{scenario_id}.csv"))
    )
    return ScenarioFixture(
        scenario_id,
        graph,
        columns,
        alpha=_ALPHA[scenario_id],
        notes=_NOTES[scenario_id],
        anomalies=_ANOMALIES.get(scenario_id, ()),
    )


def scenario_path(scenario_id: str):
    """Filesystem handle of a scenario's graph file (for round-trip checks)."""
    return resources.files("aitrust").joinpath("data", f"{scenario_id}.graph")


def check_transcription(fixture: ScenarioFixture) -> list[str]:
    """Cross-check a fixture's edges against its published zero rows.

    In every TrustRank column the rows printed as exactly zero must be the
    nodes unreachable from that column's seeds. Cells listed in
    ``fixture.anomalies`` are skipped, and so is the sum check of their
    column. Returns human-readable mismatches;
    an empty list means the transcription is consistent.
    """
    problems = []
    graph = fixture.graph
    for col in fixture.published_scores:
        if set(col.scores) != set(graph.tokens):
            problems.append(f"{col.label}: rows differ from the graph's node set")
            continue
        skip = {node for label, node in fixture.anomalies if label == col.label}
        total = sum(col.scores.values())
        # an anomalous cell also breaks its column's sum
        if not skip and abs(total - 1.0) > 0.005:
            problems.append(f"{col.label}: column sums to {total:.4f}")
        if col.is_pagerank:
            continue
        reach = reachable_from(graph, col.seeds)
        for tok in graph.tokens:
            if tok in skip:
                continue
            printed_zero = col.scores[tok] == 0.0
            if printed_zero == (tok in reach):
                state = "zero" if printed_zero else "nonzero"
                problems.append(f"{col.label}: {tok} printed {state} but is "
                                f"{'reachable' if tok in reach else 'unreachable'}")
    return problems
