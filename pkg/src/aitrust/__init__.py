"""Trustworthiness assessment of AI systems with PageRank and TrustRank.

A system is modelled as a layered graph of requirements, aspects and
components. PageRank measures how central each node is; TrustRank measures
how much trust reaches it from a hand-picked seed set. Comparing the two
flags nodes that matter but are poorly trusted.
"""

__version__ = "0.1.0"

from .assessment import (
    AssessmentReport,
    ClassificationThresholds,
    Condition,
    aggregate_requirement,
    aggregate_scope,
    assess,
    classify_nodes,
    edge_perturbation,
    seed_sweep,
)
from .catalog import (
    SCENARIO_IDS,
    altai_catalog,
    check_transcription,
    find_requirement,
    scenario_graph,
)
from .dense import solve_fixed_point_dense
from .formats import (
    GraphSyntaxError,
    GraphValidationError,
    emit_dot,
    emit_graph_text,
    emit_report_json,
    emit_scores_csv,
    parse_graph_text,
    parse_scores_csv,
)
from .graph import (
    Layer,
    Node,
    NodeNotFoundError,
    Orientation,
    TrustGraph,
    in_neighbors,
    out_degree,
    reachable_from,
    validate_graph,
)
from .ranking import (
    ConvergenceWarning,
    RankParams,
    ScoreVector,
    check_convergence,
    iterate_once,
    pagerank,
    trustrank,
)
from .svg import emit_svg_bars
