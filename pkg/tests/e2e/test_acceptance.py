"""
End-to-end agreement sweeps between the solver and the exhaustive oracles
These tests are slow and should be run sparingly
"""
import pytest
from hypothesis import assume, given, settings

from src.benchmark import runtime_shape, summarize
from src.oracle import (
    enumerate_small_trees,
    oracle_cs,
    oracle_cs_unrooted,
    oracle_guard_profile,
    oracle_min_guard,
    small_tree_corpus,
)
from src.scheduling import strategy_to_schedule, tds_to_tree
from src.search_semantics import replay, verify
from src.solver import SolverOptions, solve_rooted, solve_unrooted, subtree_frontiers
from src.transform import to_node_weighted
from src.tree_core import SubtreeRef
from tests.instances import REDUCTION_INSTANCES, small_weighted_trees


@pytest.mark.e2e
@pytest.mark.slow
@pytest.mark.oracle
class TestSolverMatchesOracle:
    """Solver and best-first oracle agree on every small tree."""

    @pytest.mark.parametrize("edges", range(1, 8))
    def test_rooted_normalized_leaves(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 2, 3}, normalize_leaves=True):
            solution = solve_rooted(tree)
            assert solution.k == oracle_cs(tree)[0], tree
            assert verify(tree, solution.strategy, solution.k).ok, tree

    @pytest.mark.parametrize("edges", range(1, 6))
    def test_rooted_all_weights(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 2, 3}):
            assert solve_rooted(tree).k == oracle_cs(tree)[0], tree

    @pytest.mark.parametrize("edges", [6, 7])
    def test_rooted_heavy_leaves(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 3}):
            assert solve_rooted(tree).k == oracle_cs(tree)[0], tree

    @settings(max_examples=300, deadline=None)
    @given(small_weighted_trees(max_edges=7))
    def test_rooted_sampled_weights(self, tree):
        node_weighted = tree.with_weights(edge_weights={e: 1 for e in tree.edge_keys})
        assume(node_weighted.max_degree() <= 3)
        assert solve_rooted(node_weighted).k == oracle_cs(node_weighted)[0], node_weighted

    def test_unrooted(self):
        for tree in small_tree_corpus(5, 3, {1, 2}):
            solution = solve_unrooted(tree)
            start, k, _ = oracle_cs_unrooted(tree)
            assert solution.k == k, tree
            assert solution.root == start, tree

    @pytest.mark.parametrize("edges", range(1, 4))
    def test_edge_weighted(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 2}, edge_weight_set=(1, 2, 3)):
            solution = solve_rooted(tree)
            assert solution.k == oracle_cs(tree)[0], tree
            report = replay(tree, solution.strategy, budget=solution.k, require_complete=True)
            assert report.ok, tree

    def test_naive_k_agrees(self):
        options = SolverOptions(naive_k=True)
        for tree in small_tree_corpus(5, 3, {1, 2}, normalize_leaves=True):
            assert solve_rooted(tree, options).k == solve_rooted(tree).k, tree


@pytest.mark.e2e
@pytest.mark.slow
@pytest.mark.oracle
class TestFrontierCompleteness:
    """Every frontier holds the least guard weight reachable at every budget."""

    @pytest.mark.parametrize("edges", range(2, 8))
    def test_against_min_guard_oracle(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 2, 3}, normalize_leaves=True):
            frontiers = subtree_frontiers(tree, SolverOptions(), {})
            total = sum(tree.vertex_weights)
            for v in tree.vertices:
                if not tree.children(v):
                    continue
                profile = oracle_guard_profile(SubtreeRef(tree, v))
                for k in range(tree.vertex_weights[v], total + 1):
                    expected = profile.min_guard(k)[0]
                    assert frontiers[v].best_guard_at(k) == expected, (tree, v, k)

    @pytest.mark.parametrize("edges", range(2, 5))
    def test_profile_matches_min_guard(self, edges):
        for tree in enumerate_small_trees(edges, 3, {1, 2}, normalize_leaves=True):
            v = tree.root
            profile = oracle_guard_profile(SubtreeRef(tree, v))
            for k in range(tree.vertex_weights[v], sum(tree.vertex_weights) + 1):
                assert oracle_min_guard(SubtreeRef(tree, v), k)[0] == profile.min_guard(k)[0]


@pytest.mark.e2e
@pytest.mark.slow
class TestTransformationInvariance:

    @settings(max_examples=200, deadline=None)
    @given(small_weighted_trees(max_edges=6))
    def test_node_weighted_form_keeps_search_number(self, tree):
        prepared = to_node_weighted(tree)
        if tree.has_unit_edges:
            assert len(prepared.edge_keys) == len(tree.edge_keys)
        else:
            assert len(prepared.edge_keys) == 2 * len(tree.edge_keys)
        assert oracle_cs(prepared)[0] == oracle_cs(tree)[0]
        assert to_node_weighted(prepared) == prepared


@pytest.mark.e2e
@pytest.mark.slow
@pytest.mark.oracle
class TestLargeReductionTrees:

    def test_blocked_instance_needs_more_than_4l(self):
        inst, _ = REDUCTION_INSTANCES['three_tasks_blocked']
        rt = tds_to_tree(inst)
        k, _ = oracle_cs(rt.tree)
        assert k > rt.k
        assert k == solve_rooted(rt.tree).k

    @pytest.mark.parametrize("name", ["two_unit_tasks", "growing_durations"])
    def test_oracle_witness_translates(self, name):
        inst, _ = REDUCTION_INSTANCES[name]
        rt = tds_to_tree(inst)
        k, witness = oracle_cs(rt.tree)
        assert k <= rt.k
        assert strategy_to_schedule(inst, rt, witness).feasible


@pytest.mark.e2e
@pytest.mark.slow
class TestRuntimeShape:

    def test_polynomial_growth(self):
        results = runtime_shape(sizes=(50, 100, 200), seed=0)
        summary = summarize(results)
        assert summary['slope'] <= 4
        assert results.loc[results['n'] == 200, 'seconds'].max() < 60
