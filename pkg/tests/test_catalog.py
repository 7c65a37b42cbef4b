import math

import pytest

from aitrust import (
    Layer,
    Orientation,
    altai_catalog,
    check_transcription,
    find_requirement,
    scenario_graph,
)
from aitrust.catalog import SCENARIO_IDS


def test_seven_requirements_in_order():
    titles = [r.title for r in altai_catalog()]
    assert titles == [
        "Human Agency & Oversight",
        "Technical Robustness & Safety",
        "Privacy & Data Governance",
        "Transparency",
        "Diversity, Non-Discrimination & Fairness",
        "Societal & Environmental Wellbeing",
        "Accountability",
    ]
    assert len({r.key for r in altai_catalog()}) == 7


def test_footnote_aspects():
    assert find_requirement("Transparency").aspects == ("Traceability", "Explainability", "Communication")
    assert set(find_requirement("technical-robustness-safety").aspects) == {
        "Resilience to Attack & Security",
        "Fall Back Plan & General Safety",
        "Accuracy",
        "Reliability & Reproducibility",
    }


def test_every_requirement_has_aspects_and_description():
    for r in altai_catalog():
        assert r.aspects and r.description


def test_unknown_requirement():
    with pytest.raises(KeyError, match="known keys"):
        find_requirement("speed")


def test_scenario_one_roster():
    g = scenario_graph("robustness-topdown").graph
    assert len(g) == 17
    assert g.nodes_in(Layer.ASPECT) == ("A1", "A2", "A3", "A4")
    assert len(g.nodes_in(Layer.COMPONENT)) == 13
    assert g.orientation is Orientation.TOP_DOWN


def test_scenario_two_roster():
    g = scenario_graph("transparency-bottomup").graph
    assert len(g) == 14
    assert g.orientation is Orientation.BOTTOM_UP
    assert g.nodes_in(Layer.ASPECT) == ("A1", "A2", "A3")


def test_unknown_scenario_lists_ids():
    with pytest.raises(KeyError) as info:
        scenario_graph("foo")
    for sid in SCENARIO_IDS:
        assert sid in str(info.value)


@pytest.mark.parametrize("sid", SCENARIO_IDS)
def test_fixture_columns(sid):
    fx = scenario_graph(sid)
    assert fx.column("PageRank").is_pagerank
    anomalous = {label for label, _ in fx.anomalies}
    for col in fx.published_scores:
        assert set(col.scores) == set(fx.graph.tokens)
        if col.label not in anomalous:
            assert math.isclose(sum(col.scores.values()), 1.0, abs_tol=0.005)


@pytest.mark.parametrize("sid", SCENARIO_IDS)
def test_transcription_consistent(sid):
    assert check_transcription(scenario_graph(sid)) == []


def test_transcription_validator_catches_missing_edge():
    fx = scenario_graph("robustness-topdown")
    broken = fx.graph.replace(edges=[e for e in fx.graph.edges if e != ("A4", "M9")])
    problems = check_transcription(type(fx)(fx.id, broken, fx.published_scores, fx.alpha, fx.notes))
    assert any("M9" in p for p in problems)


def test_documented_anomaly():
    fx = scenario_graph("transparency-bottomup")
    assert fx.anomalies == (("TrustRank{A1,A2,A3}", "A3"),)
    assert fx.column("TrustRank{A1,A2,A3}").scores["A3"] == 0.0
    assert "0.2597" in fx.notes


def test_all_nodes_column_seeds():
    fx = scenario_graph("robustness-topdown")
    col = fx.column("TrustRank{All Nodes}")
    assert col.seeds == fx.graph.tokens
