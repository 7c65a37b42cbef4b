import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aitrust import (
    ConvergenceWarning,
    NodeNotFoundError,
    RankParams,
    ScoreVector,
    TrustGraph,
    check_convergence,
    iterate_once,
    pagerank,
    reachable_from,
    scenario_graph,
    solve_fixed_point_dense,
    trustrank,
)
from graphgen import graphs_with_seeds

# Fixed points computed offline from the characteristic polynomials of the
# normalized update (quadratic for the 2-node sink, cubic for the chain).
TWO_NODE_A = 0.2216368750839041
CHAIN_TR = (0.23888445334600672, 0.3233727649523826, 0.4377427817016077)


def two_node():
    return TrustGraph(["A", "B"], [("A", "B")])


def cycle(n):
    toks = [f"C{i}" for i in range(n)]
    return TrustGraph(toks, [(toks[i], toks[(i + 1) % n]) for i in range(n)])


def chain3():
    return TrustGraph(["A", "B", "C"], [("A", "B"), ("B", "C")])


class TestParams:
    @pytest.mark.parametrize(
        "kwargs", [dict(alpha=0.0), dict(alpha=1.0), dict(epsilon=0.0), dict(max_iterations=0)]
    )
    def test_rejects_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            RankParams(**kwargs)

    def test_defaults(self):
        p = RankParams()
        assert (p.alpha, p.epsilon, p.max_iterations) == (0.85, 1e-8, 1000)


class TestIterateOnce:
    def test_two_node_hand_sweep(self):
        out = iterate_once(two_node(), {"A": 0.5, "B": 0.5}, {"A": 0.075, "B": 0.075}, 0.85)
        assert out["A"] == pytest.approx(3 / 23, abs=1e-15)
        assert out["B"] == pytest.approx(20 / 23, abs=1e-15)
        assert out.iterations == 1

    def test_cycle_uniform_fixed_point(self):
        g = cycle(3)
        out = iterate_once(g, {t: 1 / 3 for t in g.tokens}, {t: 0.05 for t in g.tokens}, 0.85)
        assert all(v == pytest.approx(1 / 3, abs=1e-15) for v in out.values())

    def test_zero_teleport_rejected(self):
        with pytest.raises(ValueError, match="teleport"):
            iterate_once(two_node(), {"A": 0.5, "B": 0.5}, {"A": 0.0, "B": 0.0}, 0.85)

    def test_domain_mismatch(self):
        with pytest.raises(ValueError):
            iterate_once(two_node(), {"A": 1.0}, {"A": 0.1, "B": 0.1}, 0.85)


class TestClosedForms:
    def test_two_node_sink(self):
        pr = pagerank(two_node(), RankParams(epsilon=1e-15))
        assert pr["A"] == pytest.approx(TWO_NODE_A, abs=1e-9)
        assert pr["B"] == pytest.approx(1 - TWO_NODE_A, abs=1e-9)

    def test_two_node_rounded_example(self):
        pr = pagerank(two_node())
        assert round(pr["A"], 4) == 0.2216 and round(pr["B"], 4) == 0.7784

    def test_chain_trustrank(self):
        tr = trustrank(chain3(), ["A"], RankParams(epsilon=1e-12))
        for tok, want in zip("ABC", CHAIN_TR):
            assert tr[tok] == pytest.approx(want, abs=1e-6)

    @pytest.mark.parametrize("n", [2, 3, 5, 11])
    @pytest.mark.parametrize("alpha", [0.15, 0.5, 0.85, 0.99])
    def test_cycles_uniform(self, n, alpha):
        g = cycle(n)
        for vec in (pagerank(g, RankParams(alpha=alpha)), trustrank(g, g.tokens, RankParams(alpha=alpha))):
            assert max(abs(v - 1 / n) for v in vec.values()) <= 1e-12

    def test_dense_two_node(self):
        v = solve_fixed_point_dense(two_node(), {"A": 0.075, "B": 0.075}, 0.85)
        assert v["A"] == pytest.approx(TWO_NODE_A, abs=1e-10)

    def test_dense_cycle(self):
        g = cycle(3)
        v = solve_fixed_point_dense(g, {t: 0.05 for t in g.tokens}, 0.85)
        assert all(x == pytest.approx(1 / 3, abs=1e-12) for x in v.values())

    def test_dense_size_bound(self):
        g = TrustGraph([f"N{i}" for i in range(1001)], [])
        with pytest.raises(ValueError, match="limited"):
            solve_fixed_point_dense(g, {t: 1.0 for t in g.tokens}, 0.85)


class TestConvergenceCheck:
    def test_identical(self):
        assert check_convergence({"a": 0.3, "b": 0.7}, {"a": 0.3, "b": 0.7}, 1e-12)

    def test_large_difference(self):
        assert not check_convergence({"a": 0.5, "b": 0.5}, {"a": 0.501, "b": 0.5}, 1e-8)

    def test_boundary_is_strict(self):
        assert check_convergence({"a": 0.5}, {"a": 0.5 + 9e-9}, 1e-8)
        assert not check_convergence({"a": 0.0}, {"a": 1e-8}, 1e-8)

    def test_mismatched_domains(self):
        with pytest.raises(ValueError):
            check_convergence({"a": 1.0}, {"b": 1.0}, 1e-8)


class TestTrustRankErrors:
    def test_empty_seeds(self):
        with pytest.raises(ValueError, match="at least one trusted seed"):
            trustrank(chain3(), [])

    def test_unknown_seed(self):
        with pytest.raises(NodeNotFoundError):
            trustrank(chain3(), ["Z"])

    def test_bad_normalize(self):
        with pytest.raises(ValueError):
            trustrank(chain3(), ["A"], normalize="never")


class TestNonConvergence:
    def test_reported_not_raised(self):
        g = scenario_graph("robustness-topdown").graph
        with pytest.warns(ConvergenceWarning):
            v = pagerank(g, RankParams(max_iterations=2))
        assert not v.converged and v.iterations == 2
        assert math.fsum(v.values()) == pytest.approx(1.0, abs=1e-12)


class TestScenarios:
    def test_table5_pagerank_examples(self):
        fx = scenario_graph("robustness-topdown")
        pr = pagerank(fx.graph, RankParams(alpha=fx.alpha))
        assert pr["M13"] == pytest.approx(0.3380, abs=2e-4)
        assert pr["M7"] == pytest.approx(0.2041, abs=2e-4)
        assert pr["A1"] == pytest.approx(0.0157, abs=2e-4)

    def test_table5_trustrank_published_values_need_final_normalization(self):
        g = scenario_graph("robustness-topdown").graph
        tr = trustrank(g, ["A3", "A4"], normalize="final")
        for tok, want in {"A3": 0.1848, "A4": 0.1848, "M13": 0.1858}.items():
            assert tr[tok] == pytest.approx(want, abs=1e-4)

    def test_iteration_mode_keeps_zero_pattern(self):
        g = scenario_graph("robustness-topdown").graph
        tr = trustrank(g, ["A3", "A4"])
        assert {t for t, v in tr.items() if v == 0} == {"A1", "A2", "M1", "M3", "M4", "M5", "M6"}

    @pytest.mark.parametrize("sid", ["robustness-topdown", "transparency-bottomup"])
    def test_deltas_shrink_every_two_steps(self, sid):
        fx = scenario_graph(sid)
        runs = [pagerank(fx.graph)] + [
            trustrank(fx.graph, col.seeds) for col in fx.trustrank_columns
        ]
        for run in runs:
            d = run.deltas
            assert all(d[i + 2] < d[i] for i in range(3, len(d) - 2))

    def test_dense_agrees_with_final_mode(self):
        g = scenario_graph("transparency-bottomup").graph
        tr = trustrank(g, ["A1", "A2"], RankParams(epsilon=1e-13), normalize="final")
        ref = solve_fixed_point_dense(g, {t: float(t in ("A1", "A2")) for t in g.tokens}, 0.85, normalize="final")
        assert max(abs(tr[t] - ref[t]) for t in g.tokens) < 1e-10


class TestScoreVector:
    def test_mapping_protocol(self):
        v = ScoreVector({"b": 0.25, "a": 0.75}, iterations=3, converged=True)
        assert set(v) == {"a", "b"} and len(v) == 2 and v["a"] == 0.75
        assert v.support() == {"a", "b"}
        assert v.values_for(["b", "a"]).tolist() == [0.25, 0.75]


@settings(max_examples=150, deadline=None)
@given(graphs_with_seeds(), st.sampled_from([0.5, 0.85, 0.95]))
def test_distribution_and_support(gs, alpha):
    g, seeds = gs
    params = RankParams(alpha=alpha)
    pr = pagerank(g, params)
    for mode in ("iteration", "final"):
        tr = trustrank(g, seeds, params, normalize=mode)
        assert abs(math.fsum(tr.values()) - 1) <= 1e-9
        assert all(0.0 <= v <= 1.0 for v in tr.values())
        assert tr.support() == reachable_from(g, seeds)
    assert abs(math.fsum(pr.values()) - 1) <= 1e-9
    assert all(0.0 < v <= 1.0 for v in pr.values())


@settings(max_examples=100, deadline=None)
@given(graphs_with_seeds(max_nodes=8))
def test_matches_dense_oracle(gs):
    g, seeds = gs
    pr = pagerank(g)
    ref = solve_fixed_point_dense(g, {t: 0.15 / len(g.tokens) for t in g.tokens}, 0.85)
    assert max(abs(pr[t] - ref[t]) for t in g.tokens) < 1e-7
    tr = trustrank(g, seeds)
    ref = solve_fixed_point_dense(g, {t: 0.15 * (t in seeds) for t in g.tokens}, 0.85)
    assert max(abs(tr[t] - ref[t]) for t in g.tokens) < 1e-7


@settings(max_examples=60, deadline=None)
@given(graphs_with_seeds(min_nodes=2), st.randoms(use_true_random=False))
def test_permutation_equivariant_bit_exact(gs, rnd):
    g, seeds = gs
    perm = list(g.tokens)
    rnd.shuffle(perm)
    mapping = {t: "P" + p for t, p in zip(g.tokens, perm)}
    h = g.relabel(mapping)
    pr_g, pr_h = pagerank(g), pagerank(h)
    tr_g, tr_h = trustrank(g, seeds), trustrank(h, [mapping[s] for s in seeds])
    for t in g.tokens:
        assert pr_h[mapping[t]] == pr_g[t]
        assert tr_h[mapping[t]] == tr_g[t]


@settings(max_examples=30, deadline=None)
@given(graphs_with_seeds())
def test_deterministic(gs):
    g, seeds = gs
    a, b = trustrank(g, seeds), trustrank(g, seeds)
    assert a == b and a.deltas == b.deltas


def test_equality_ignores_delta_history():
    a = ScoreVector({"x": 1.0}, 2, True, (0.5, 0.1))
    b = ScoreVector({"x": 1.0}, 2, True, ())
    assert a == b


def test_no_warning_when_converged():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pagerank(chain3())
