"""
Unit tests for the exhaustive oracles and small tree enumeration
"""
import pytest
from hypothesis import given, settings

from src.exceptions import OracleCapExceededError
from src.oracle import (
    enumerate_small_trees,
    oracle_cs,
    oracle_cs_unrooted,
    oracle_guard_profile,
    oracle_min_guard,
    permutation_oracle_cs,
    small_tree_corpus,
)
from src.search_semantics import SearchStrategy, replay, verify
from src.tree_core import SubtreeRef, WeightedRootedTree
from tests.instances import small_weighted_trees, unit_path, unit_star


class TestOracleCs:
    """Test the best-first oracle."""

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_unit_path_from_end(self, n):
        assert oracle_cs(unit_path(n))[0] == 1

    def test_star_from_center(self, star3):
        assert oracle_cs(star3)[0] == 2

    def test_subdivided_heavy_edge(self):
        t = WeightedRootedTree.from_edges([2, 3, 1], [(0, 1, 1), (1, 2, 1)])
        assert oracle_cs(t)[0] == 3

    def test_explicit_start(self):
        assert oracle_cs(unit_path(5), start=2)[0] == 2

    def test_single_vertex(self):
        k, s = oracle_cs(WeightedRootedTree.from_edges([5], []))
        assert k == 0
        assert s.moves == ()

    def test_witness_verifies(self, mixed_tree):
        k, s = oracle_cs(mixed_tree)
        report = replay(mixed_tree, s, budget=k, require_complete=True)
        assert report.ok
        assert report.searchers_used == k

    def test_cap(self):
        with pytest.raises(OracleCapExceededError):
            oracle_cs(unit_path(22))

    def test_custom_cap(self, star3):
        with pytest.raises(OracleCapExceededError):
            oracle_cs(star3, max_edges=2)

    def test_unrooted(self, unit_path5):
        start, k, s = oracle_cs_unrooted(unit_path5)
        assert (start, k) == (0, 1)
        assert verify(unit_path5, s, 1).ok

    def test_unrooted_star(self):
        start, k, _ = oracle_cs_unrooted(unit_star(3))
        assert k == 2
        assert start == 0


class TestPermutationOracle:
    """Test the independent permutation oracle."""

    def test_star(self, star3):
        k, s = permutation_oracle_cs(star3)
        assert k == 2
        assert verify(star3, s, 2).ok

    def test_cap(self):
        with pytest.raises(OracleCapExceededError):
            permutation_oracle_cs(unit_path(8))

    def test_single_vertex(self):
        assert permutation_oracle_cs(WeightedRootedTree.from_edges([1], []))[0] == 0

    @settings(max_examples=60, deadline=None)
    @given(small_weighted_trees())
    def test_agrees_with_best_first(self, tree):
        assert permutation_oracle_cs(tree)[0] == oracle_cs(tree)[0]


class TestMinGuard:
    """Test least guard weights of partial strategies."""

    def test_nothing_affordable(self, heavy_middle_path):
        g, s = oracle_min_guard(SubtreeRef(heavy_middle_path, 0), 1)
        assert g == 1
        assert s == SearchStrategy(0, (), head=0)

    def test_enough_to_finish(self, heavy_middle_path):
        g, s = oracle_min_guard(SubtreeRef(heavy_middle_path, 0), 5)
        assert g == 0
        assert s.moves == ((0, 1), (1, 2))

    def test_below_head_weight(self, heavy_middle_path):
        t = heavy_middle_path.reroot(1)
        assert oracle_min_guard(SubtreeRef(t, 1), 4) is None

    def test_leaf_head(self, star3):
        g, s = oracle_min_guard(SubtreeRef(star3, 2), 0)
        assert g == 0
        assert s.moves == ()

    def test_profile_is_pareto(self, heavy_middle_path):
        profile = oracle_guard_profile(SubtreeRef(heavy_middle_path, 0))
        assert profile.pareto == [(1, 1, 0), (5, 0, 3)]
        assert profile.min_guard(0) is None
        assert profile.min_guard(4) == (1, 0)
        assert profile.strategies[3] == ((0, 1), (1, 2))

    def test_witness_is_within_budget(self, mixed_tree):
        sub = SubtreeRef(mixed_tree, 1)
        for k in range(3, 9):
            g, s = oracle_min_guard(sub, k)
            report = replay(mixed_tree, s, budget=k)
            assert report.ok
            assert report.final_state.guard_weight == g


class TestEnumeration:
    """Test rooted tree enumeration."""

    def test_one_edge(self):
        assert len(list(enumerate_small_trees(1, 3, {1}))) == 1

    def test_two_edges(self):
        trees = list(enumerate_small_trees(2, 3, {1}))
        assert len(trees) == 2
        assert {t.max_degree() for t in trees} == {2}

    def test_three_edges(self):
        assert len(list(enumerate_small_trees(3, 3, {1}))) == 4

    def test_degree_cap_is_respected(self):
        trees = list(enumerate_small_trees(4, 2, {1}))
        assert trees
        assert all(t.max_degree() <= 2 for t in trees)

    def test_vertex_weights_distinguish(self):
        assert len(list(enumerate_small_trees(1, 2, {1, 2}))) == 4

    def test_normalized_leaves(self):
        assert len(list(enumerate_small_trees(1, 2, {1, 2}, normalize_leaves=True))) == 1

    def test_edge_weights(self):
        assert len(list(enumerate_small_trees(1, 2, {1}, edge_weight_set=(1, 2)))) == 2

    def test_corpus_chains_sizes(self):
        corpus = small_tree_corpus(2, 3, {1})
        assert [len(t.edge_keys) for t in corpus] == [1, 2, 2]

    def test_no_duplicates(self):
        forms = [t.canonical_form() for t in enumerate_small_trees(4, 3, {1, 2})]
        assert len(forms) == len(set(forms))
