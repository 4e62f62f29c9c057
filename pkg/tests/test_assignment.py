import itertools
import math

import numpy as np
import pytest

from poisson_matching.assignment import (Matching, brute_force_min,
                                         improvable_pair,
                                         max_cardinality_min_cost,
                                         min_cost_all_blue, min_cost_perfect)
from poisson_matching.geometry import is_parallel_free
from poisson_matching.sampling import derived_rng
from poisson_matching.verify import check_planarity

SQUARE_REDS = np.array([[0.0, 0.0], [1.0, 0.0]])
SQUARE_BLUES = np.array([[0.0, 1.0], [1.0, 1.0]])


class TestMinCostPerfect:
    def test_single_pair(self):
        m = min_cost_perfect([[0, 0]], [[1, 0]])
        assert m.edges == [(0, 0)]
        assert m.total_length == pytest.approx(1.0)

    def test_square_prefers_vertical_pairs(self):
        m = min_cost_perfect(SQUARE_REDS, SQUARE_BLUES)
        assert sorted(m.edges) == [(0, 0), (1, 1)]
        assert m.total_length == pytest.approx(2.0)

    def test_size_mismatch_rejected(self):
        with pytest.raises(ValueError):
            min_cost_perfect([[0, 0]], [])

    def test_matches_oracle_on_random_instances(self):
        rng = derived_rng(17)
        for trial in range(200):
            n = int(rng.integers(1, 8))
            reds = rng.uniform(0, 1, (n, 2))
            blues = rng.uniform(0, 1, (n, 2))
            fast = min_cost_perfect(reds, blues)
            slow = brute_force_min(reds, blues)
            assert fast.total_length == slow.total_length

    def test_empty(self):
        assert min_cost_perfect(np.empty((0, 2)), np.empty((0, 2))).edges == []


class TestBruteForce:
    def test_empty(self):
        m = brute_force_min(np.empty((0, 2)), np.empty((0, 2)))
        assert m.edges == [] and m.total_length == 0.0

    def test_collinear_pairs(self):
        m = brute_force_min([[0, 0], [2, 0]], [[1, 0], [3, 0]])
        assert sorted(m.edges) == [(0, 0), (1, 1)]
        assert m.total_length == pytest.approx(2.0)

    def test_factorial_guard(self):
        pts = np.random.default_rng(0).uniform(0, 1, (10, 2))
        with pytest.raises(ValueError):
            brute_force_min(pts, pts + 5)

    def test_tie_rule_lexicographic(self):
        # two reds equidistant from two blues: the earlier partner sequence wins
        reds = [[0.0, 0.0], [2.0, 0.0]]
        blues = [[1.0, 1.0], [1.0, -1.0]]
        m = brute_force_min(reds, blues)
        # both matchings cost 2*sqrt(2); partner of red (0,0) must be (1,-1)
        assert m.edges[0] == (0, 1)


class TestMinCostAllBlue:
    def test_nearest_red_used(self):
        m = min_cost_all_blue([[0, 0], [5, 0]], [[0.1, 0]])
        assert m.edges == [(0, 0)]
        assert m.unmatched_reds == [1]

    def test_empty_blues(self):
        m = min_cost_all_blue([[0, 0]], np.empty((0, 2)))
        assert m.edges == [] and m.unmatched_reds == [0]

    def test_fewer_reds_rejected(self):
        with pytest.raises(ValueError):
            min_cost_all_blue([[0, 0]], [[1, 0], [2, 0]])

    def test_matches_injection_oracle(self):
        rng = derived_rng(23)
        for _ in range(50):
            reds = rng.uniform(0, 1, (5, 2))
            blues = rng.uniform(0, 1, (3, 2))
            got = min_cost_all_blue(reds, blues).total_length
            best = min(
                sum(math.hypot(*(reds[r] - blues[b])) for b, r in enumerate(inj))
                for inj in itertools.permutations(range(5), 3)
            )
            assert got == pytest.approx(best, abs=1e-12)


class TestMaxCardinalityMinCost:
    def test_excess_blues_left_unmatched(self):
        m = max_cardinality_min_cost([[0.0, 0.0]], [[0.1, 0.0], [5.0, 0.0]])
        assert m.edges == [(0, 0)]
        assert m.unmatched_blues == [1]
        assert m.kind == "partial"

    def test_balanced_input_is_perfect(self):
        rng = derived_rng(31)
        reds = rng.uniform(0, 1, (4, 2))
        blues = rng.uniform(0, 1, (4, 2))
        m = max_cardinality_min_cost(reds, blues)
        assert m.kind == "perfect"
        assert m.total_length == pytest.approx(
            min_cost_perfect(reds, blues).total_length, abs=1e-9)

    def test_empty_side(self):
        m = max_cardinality_min_cost(np.empty((0, 2)), [[1, 0]])
        assert m.edges == [] and m.unmatched_blues == [0]

    def test_agrees_with_all_blue_when_blues_fewer(self):
        rng = derived_rng(37)
        for _ in range(20):
            reds = rng.uniform(0, 1, (6, 2))
            blues = rng.uniform(0, 1, (4, 2))
            a = max_cardinality_min_cost(reds, blues)
            b = min_cost_all_blue(reds, blues)
            assert a.total_length == pytest.approx(b.total_length, abs=1e-12)
            assert len(a.edges) == 4 and not a.unmatched_blues


class TestImprovablePair:
    def test_crossed_square_improvable(self):
        m = Matching(SQUARE_REDS, SQUARE_BLUES, [(0, 1), (1, 0)], kind="perfect")
        assert improvable_pair(m) == (0, 1)
        improvement = m.total_length - 2.0
        assert improvement == pytest.approx(2 * math.sqrt(2) - 2)

    def test_optimal_square_not_improvable(self):
        m = Matching(SQUARE_REDS, SQUARE_BLUES, [(0, 0), (1, 1)], kind="perfect")
        assert improvable_pair(m) is None

    def test_solver_output_never_improvable(self):
        rng = derived_rng(31)
        for _ in range(50):
            reds = rng.uniform(0, 1, (20, 2))
            blues = rng.uniform(0, 1, (20, 2))
            assert improvable_pair(min_cost_perfect(reds, blues)) is None

    def test_swap_never_decreases_optimal_cost(self):
        rng = derived_rng(37)
        reds = rng.uniform(0, 1, (8, 2))
        blues = rng.uniform(0, 1, (8, 2))
        m = min_cost_perfect(reds, blues)
        base = m.total_length
        for a in range(len(m.edges)):
            for b in range(a + 1, len(m.edges)):
                edges = list(m.edges)
                (i, x), (j, y) = edges[a], edges[b]
                edges[a], edges[b] = (i, y), (j, x)
                swapped = Matching(reds, blues, edges, kind="perfect")
                assert swapped.total_length >= base - 1e-9


class TestPlanarityOfMinimum:
    def test_min_cost_outputs_planar(self):
        # parallel-free random inputs: minimum matchings have no crossings
        rng = derived_rng(41)
        for n in (5, 20):
            for _ in range(10):
                reds = rng.uniform(0, 1, (n, 2))
                blues = rng.uniform(0, 1, (n, 2))
                if n <= 20:
                    assert is_parallel_free(np.concatenate([reds, blues])[:20])
                m = min_cost_perfect(reds, blues)
                assert check_planarity(m).passed


def test_matching_json_round_trip():
    rng = derived_rng(43)
    reds = rng.uniform(0, 1, (5, 2))
    blues = rng.uniform(0, 1, (5, 2))
    m = min_cost_perfect(reds, blues)
    again = Matching.from_json(m.to_json(), reds, blues)
    assert again.edges == m.edges
    assert again.total_length == m.total_length


def test_matching_degree_constraint():
    with pytest.raises(ValueError):
        Matching(SQUARE_REDS, SQUARE_BLUES, [(0, 0), (0, 1)], kind="partial")
