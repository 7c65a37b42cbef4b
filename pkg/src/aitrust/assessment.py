"""From score vectors to trustworthiness judgments.

Nodes are classified by comparing their PageRank (importance) with their
TrustRank (trust received from the seeds); requirements are summarized over
their aspects and components; sweeps show how trust moves when the seed set
or a single edge changes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .graph import Layer, NodeNotFoundError, Orientation, TrustGraph, reachable_from
from .ranking import RankParams, ScoreVector, pagerank, trustrank

__all__ = [
    "Condition",
    "ClassificationThresholds",
    "NodeClassification",
    "Stats",
    "RequirementSummary",
    "SweepRow",
    "SeedSweep",
    "EdgeImpact",
    "AssessmentReport",
    "classify_nodes",
    "aggregate_requirement",
    "aggregate_scope",
    "seed_sweep",
    "edge_perturbation",
    "assess",
    "REPORT_VERSION",
]

REPORT_VERSION = 1


class Condition(enum.Enum):
    A = "A"  # PR >> TR
    B = "B"  # PR << TR
    C_LOW = "C_low"  # PR ~ TR, both low
    C_HIGH = "C_high"  # PR ~ TR, both high


RATIONALE = {
    Condition.A: "important but weakly linked to trusted nodes; monitor its operation",
    Condition.B: "less critical but well trusted; usable as a trust reference",
    Condition.C_LOW: "low importance and low trust; improve it or review whether it is needed",
    Condition.C_HIGH: "important and well trusted; keep supervising to hold its trust level",
}


@dataclass(frozen=True)
class ClassificationThresholds:
    """``theta`` sets the dominance ratio; ``cutoff`` the high/low split.

    With ``cutoff=None`` a score counts as high when it reaches the uniform
    share ``1/|P|``.
    """

    theta: float = 0.5
    cutoff: float | None = None

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.cutoff is not None and not self.cutoff >= 0:
            raise ValueError(f"cutoff must be non-negative, got {self.cutoff}")

    @property
    def high_mass_rule(self) -> str:
        return "above-uniform" if self.cutoff is None else f"cutoff={self.cutoff!r}"


@dataclass(frozen=True)
class NodeClassification:
    node: str
    condition: Condition
    pr: float
    tr: float
    rationale: str


def classify_nodes(
    pr: Mapping[str, float],
    tr: Mapping[str, float],
    thresholds: ClassificationThresholds | None = None,
) -> list[NodeClassification]:
    """Assign each node exactly one of A, B, C_low, C_high.

    A when ``pr >= (1+theta)*tr``, B when ``tr >= (1+theta)*pr``, otherwise C
    split on ``max(pr, tr)``. A node scoring zero in both is C_low.
    """
    thresholds = thresholds or ClassificationThresholds()
    if set(pr) != set(tr):
        raise ValueError("PageRank and TrustRank vectors cover different nodes")
    factor = 1.0 + thresholds.theta
    cut = thresholds.cutoff if thresholds.cutoff is not None else 1.0 / max(len(pr), 1)
    out = []
    for node in sorted(pr):
        p, t = float(pr[node]), float(tr[node])
        if p > 0 and p >= factor * t:
            cond = Condition.A
        elif t > 0 and t >= factor * p:
            cond = Condition.B
        elif max(p, t) >= cut:
            cond = Condition.C_HIGH
        else:
            cond = Condition.C_LOW
        out.append(NodeClassification(node, cond, p, t, RATIONALE[cond]))
    return out


@dataclass(frozen=True)
class Stats:
    count: int
    mean: float
    sum: float
    min: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "Stats | None":
        if not values:
            return None
        total = math.fsum(values)
        return cls(len(values), total / len(values), total, min(values))


@dataclass(frozen=True)
class RequirementSummary:
    requirement: str
    aspects: tuple[str, ...]
    components: tuple[str, ...]
    aspect_stats: Stats | None
    component_stats: Stats | None
    warnings: tuple[str, ...] = ()


def _neighbours(graph: TrustGraph, token: str) -> tuple[str, ...]:
    if graph.orientation is Orientation.TOP_DOWN:
        return graph.successors(token)
    if graph.orientation is Orientation.BOTTOM_UP:
        return graph.predecessors(token)
    return tuple(sorted(set(graph.successors(token)) | set(graph.predecessors(token))))


def aggregate_requirement(
    scores: Mapping[str, float], graph: TrustGraph, requirement: str
) -> RequirementSummary:
    """Mean, sum and min over a requirement's aspects (one hop) and components (two hops).

    Hops follow edge direction for top-down graphs, run against it for
    bottom-up graphs and ignore it for free graphs.
    """
    if graph.layer(requirement) is not Layer.REQUIREMENT:
        raise ValueError(f"{requirement!r} is not a requirement node")
    aspects = tuple(
        sorted(n for n in _neighbours(graph, requirement) if graph.layer(n) is Layer.ASPECT)
    )
    components = tuple(
        sorted(
            {
                m
                for a in aspects
                for m in _neighbours(graph, a)
                if graph.layer(m) is Layer.COMPONENT
            }
        )
    )
    warnings = () if aspects else (f"requirement {requirement} has no linked aspects",)
    return RequirementSummary(
        requirement,
        aspects,
        components,
        Stats.of([scores[a] for a in aspects]),
        Stats.of([scores[m] for m in components]),
        warnings,
    )


def aggregate_scope(scores: Mapping[str, float], graph: TrustGraph) -> RequirementSummary:
    """Summary over every aspect and component of a graph modelling one requirement."""
    aspects = graph.nodes_in(Layer.ASPECT)
    components = graph.nodes_in(Layer.COMPONENT)
    warnings = () if aspects else ("graph has no aspect nodes",)
    return RequirementSummary(
        graph.requirement or "(graph)",
        aspects,
        components,
        Stats.of([scores[a] for a in aspects]),
        Stats.of([scores[m] for m in components]),
        warnings,
    )


def _map(fn: Callable, items: list, workers: int | None) -> list:
    if workers and workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _deltas(new: ScoreVector, base: ScoreVector) -> dict[str, float]:
    return {k: new[k] - base[k] for k in base}


@dataclass(frozen=True)
class SweepRow:
    variant: str
    seeds: tuple[str, ...]
    scores: ScoreVector = field(repr=False)
    deltas: dict[str, float] = field(repr=False)
    max_delta: float = 0.0


@dataclass(frozen=True)
class SeedSweep:
    rows: tuple[SweepRow, ...]
    warnings: tuple[str, ...] = ()

    @property
    def baseline(self) -> SweepRow:
        return self.rows[0]


def seed_sweep(
    graph: TrustGraph,
    base_seeds: Iterable[str],
    params: RankParams | None = None,
    *,
    normalize: str = "iteration",
    workers: int | None = None,
) -> SeedSweep:
    """TrustRank for the base seeds and for every single-node addition and removal.

    Rows: the baseline, then ``+X`` for each non-seed ``X``, then ``-X`` for each
    seed, all in token order. Removals that would empty the set are skipped.
    """
    params = params or RankParams()
    base = tuple(sorted(set(base_seeds)))
    for s in base:
        if s not in graph:
            raise NodeNotFoundError(s)
    variants: list[tuple[str, tuple[str, ...]]] = [("baseline", base)]
    variants += [(f"+{n}", tuple(sorted(base + (n,)))) for n in graph.tokens if n not in base]
    warnings: list[str] = []
    if len(base) > 1:
        variants += [(f"-{s}", tuple(x for x in base if x != s)) for s in base]
    else:
        warnings.append(f"removal of {base[0] if base else 'seed'} skipped: seed set would be empty")

    results = _map(lambda v: trustrank(graph, v[1], params, normalize=normalize), variants, workers)
    baseline = results[0]
    rows = []
    for (name, seeds), vec in zip(variants, results):
        d = _deltas(vec, baseline)
        rows.append(SweepRow(name, seeds, vec, d, max((abs(x) for x in d.values()), default=0.0)))
        if not vec.converged:
            warnings.append(f"variant {name} did not converge")
    return SeedSweep(tuple(rows), tuple(warnings))


@dataclass(frozen=True)
class EdgeImpact:
    edge: tuple[str, str]
    pagerank_delta: float
    trustrank_delta: float
    trustrank: ScoreVector = field(repr=False)


def edge_perturbation(
    graph: TrustGraph,
    seeds: Iterable[str],
    params: RankParams | None = None,
    *,
    normalize: str = "iteration",
    workers: int | None = None,
) -> list[EdgeImpact]:
    """Drop each edge in turn; rank edges by the TrustRank shift they cause."""
    params = params or RankParams()
    seeds = tuple(sorted(set(seeds)))
    base_pr = pagerank(graph, params)
    base_tr = trustrank(graph, seeds, params, normalize=normalize)

    def one(edge):
        g = graph.replace(edges=[e for e in graph.edges if e != edge])
        pr = pagerank(g, params)
        tr = trustrank(g, seeds, params, normalize=normalize)
        return EdgeImpact(
            edge,
            max(abs(pr[k] - base_pr[k]) for k in base_pr),
            max(abs(tr[k] - base_tr[k]) for k in base_tr),
            tr,
        )

    impacts = _map(one, list(graph.edges), workers)
    return sorted(impacts, key=lambda e: (-e.trustrank_delta, e.edge))


@dataclass(frozen=True)
class AssessmentReport:
    graph: TrustGraph = field(repr=False)
    params: RankParams
    thresholds: ClassificationThresholds
    seeds: tuple[str, ...]
    normalize: str
    pagerank: ScoreVector = field(repr=False)
    trustrank: ScoreVector = field(repr=False)
    classifications: tuple[NodeClassification, ...] = field(repr=False)
    aggregates: dict[str, dict[str, RequirementSummary]] = field(repr=False)
    warnings: tuple[str, ...] = ()
    timestamp: str | None = None

    def to_dict(self) -> dict:
        def vec(v: ScoreVector) -> dict:
            return {
                "iterations": v.iterations,
                "converged": v.converged,
                "values": {k: v[k] for k in sorted(v)},
            }

        def stats(s: Stats | None):
            if s is None:
                return None
            return {"count": s.count, "mean": s.mean, "sum": s.sum, "min": s.min}

        def summary(s: RequirementSummary) -> dict:
            return {
                "aspects": list(s.aspects),
                "components": list(s.components),
                "aspect_stats": stats(s.aspect_stats),
                "component_stats": stats(s.component_stats),
                "warnings": list(s.warnings),
            }

        g = self.graph
        return {
            "format": "aitrust-report",
            "version": REPORT_VERSION,
            "graph": {
                "title": g.title,
                "requirement": g.requirement,
                "orientation": g.orientation.value,
                "nodes": len(g.nodes),
                "edges": len(g.edges),
            },
            "params": {
                "alpha": self.params.alpha,
                "epsilon": self.params.epsilon,
                "max_iterations": self.params.max_iterations,
                "trustrank_normalization": self.normalize,
            },
            "thresholds": {
                "theta": self.thresholds.theta,
                "high_mass_rule": self.thresholds.high_mass_rule,
            },
            "seeds": list(self.seeds),
            "scores": {"pagerank": vec(self.pagerank), "trustrank": vec(self.trustrank)},
            "classifications": [
                {
                    "node": c.node,
                    "condition": c.condition.value,
                    "pr": c.pr,
                    "tr": c.tr,
                    "rationale": c.rationale,
                }
                for c in self.classifications
            ],
            "aggregates": {
                label: {req: summary(s) for req, s in per.items()}
                for label, per in self.aggregates.items()
            },
            "warnings": list(self.warnings),
            "timestamp": self.timestamp,
        }


def assess(
    graph: TrustGraph,
    seeds: Iterable[str],
    params: RankParams | None = None,
    thresholds: ClassificationThresholds | None = None,
    *,
    normalize: str = "iteration",
    timestamp: str | None = None,
) -> AssessmentReport:
    """Run both algorithms, classify every node and summarize each requirement."""
    params = params or RankParams()
    thresholds = thresholds or ClassificationThresholds()
    seeds = tuple(sorted(set(seeds)))
    pr = pagerank(graph, params)
    tr = trustrank(graph, seeds, params, normalize=normalize)

    warnings = []
    for name, v in (("PageRank", pr), ("TrustRank", tr)):
        if not v.converged:
            warnings.append(f"{name} did not converge within {params.max_iterations} iterations")
    unreached = sorted(set(graph.tokens) - reachable_from(graph, seeds))
    if unreached:
        warnings.append(f"{len(unreached)} node(s) unreachable from the seeds: {', '.join(unreached)}")

    requirements = graph.nodes_in(Layer.REQUIREMENT)
    aggregates: dict[str, dict[str, RequirementSummary]] = {}
    for label, vec in (("pagerank", pr), ("trustrank", tr)):
        if requirements:
            per = {r: aggregate_requirement(vec, graph, r) for r in requirements}
        else:
            scope = aggregate_scope(vec, graph)
            per = {scope.requirement: scope}
        aggregates[label] = per
    for per in aggregates["pagerank"].values():
        warnings.extend(per.warnings)

    return AssessmentReport(
        graph=graph,
        params=params,
        thresholds=thresholds,
        seeds=seeds,
        normalize=normalize,
        pagerank=pr,
        trustrank=tr,
        classifications=tuple(classify_nodes(pr, tr, thresholds)),
        aggregates=aggregates,
        warnings=tuple(warnings),
        timestamp=timestamp,
    )
