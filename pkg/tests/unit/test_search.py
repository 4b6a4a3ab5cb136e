"""
Unit Tests for Exact Extremal Searches
"""
import pytest

from src.detectors.boolean_algebra import find_boolean_algebra
from src.detectors.copy_finder import CopyMode, find_copy
from src.detectors.join_detector import find_join_triple
from src.extremal.search import (
    max_avoiding, max_avoiding_exhaustive, max_no_boolean_algebra, max_no_boolean_algebra_exhaustive,
    max_no_join, max_no_join_exhaustive,
)
from src.grids.grid_core import GridShape
from src.posets.poset_core import chain_poset


class TestMaxAvoiding:
    """Test largest families free of a poset"""

    @pytest.mark.parametrize("sides,h,mode,expected", [
        ((2, 2), 2, CopyMode.WEAK, 2),
        ((2, 2, 2, 2), 3, CopyMode.WEAK, 10),
        ((2, 2), 2, CopyMode.STRONG, 3),
        ((3, 3), 2, CopyMode.WEAK, 3),
        ((2, 2, 2), 2, CopyMode.WEAK, 3),
    ])
    def test_goldens(self, sides, h, mode, expected):
        res = max_avoiding(GridShape(sides), chain_poset(h), mode)

        assert res.optimum == expected
        assert res.complete
        assert res.status == "exact"

    def test_witness_is_free(self, v_poset):
        shape = GridShape((2, 2, 2))
        res = max_avoiding(shape, v_poset, CopyMode.INDUCED)

        assert len(res.witness) == res.optimum
        assert find_copy(res.witness, v_poset, CopyMode.INDUCED) is None
        assert res.root_bound >= res.optimum

    def test_agrees_with_exhaustive(self, v_poset, diamond):
        shape = GridShape((2, 3))
        for P in (v_poset, diamond):
            for mode in CopyMode:
                fast = max_avoiding(shape, P, mode)
                slow = max_avoiding_exhaustive(shape, P, mode)
                assert fast.optimum == slow.optimum

    def test_strong_chain_within_bound(self):
        """At most d(h-1)k^(d-1) points avoid a strong h-chain"""
        for k, d, h in ((2, 2, 2), (3, 2, 2), (2, 3, 2), (3, 2, 3)):
            res = max_avoiding(GridShape.uniform(k, d), chain_poset(h), CopyMode.STRONG)
            assert res.optimum <= d * (h - 1) * k ** (d - 1)

    def test_threads_do_not_change_result(self):
        shape = GridShape((2, 2, 2))
        one = max_avoiding(shape, chain_poset(3), CopyMode.WEAK, threads=1)
        many = max_avoiding(shape, chain_poset(3), CopyMode.WEAK, threads=4)

        assert one.optimum == many.optimum
        assert one.witness == many.witness
        assert one.nodes == many.nodes

    def test_budget_gives_lower_bound(self, v_poset):
        res = max_avoiding(GridShape.uniform(3, 3), v_poset, CopyMode.INDUCED, budget=10)

        assert not res.complete
        assert res.status == "lower_bound"
        assert res.optimum >= 1

    def test_budget_join_search(self):
        res = max_no_join(GridShape.uniform(3, 3), budget=10)

        assert not res.complete
        assert res.optimum >= 1

    def test_root_closed_instance_completes(self):
        """Greedy incumbent meeting the diagonal bound finishes within any small budget"""
        res = max_avoiding(GridShape.uniform(3, 3), chain_poset(3), CopyMode.STRONG, budget=10)

        assert res.complete
        assert res.optimum == 26


class TestBooleanAlgebras:
    """Test b(n, d) and grid variants"""

    @pytest.mark.parametrize("sides,d,expected", [
        ((2, 2), 1, 2),
        ((2, 2, 2), 1, 3),
        ((2, 2, 2, 2), 1, 6),
        ((3, 3), 2, 6),
        ((2, 2), 2, 3),
    ])
    def test_goldens(self, sides, d, expected):
        res = max_no_boolean_algebra(GridShape(sides), d)

        assert res.optimum == expected
        assert find_boolean_algebra(res.witness, d) is None

    def test_agrees_with_exhaustive(self):
        shape = GridShape((2, 2, 2))

        assert max_no_boolean_algebra(shape, 2).optimum == max_no_boolean_algebra_exhaustive(shape, 2).optimum


class TestJoinFree:
    """Test largest join-free families"""

    def test_square(self):
        assert max_no_join(GridShape((2, 2))).optimum == 3

    def test_line(self):
        assert max_no_join(GridShape((2,))).optimum == 2

    def test_three_by_three(self):
        res = max_no_join(GridShape((3, 3)))

        assert 5 <= res.optimum <= 6
        assert find_join_triple(res.witness) is None

    def test_agrees_with_exhaustive(self):
        shape = GridShape((2, 3))

        assert max_no_join(shape).optimum == max_no_join_exhaustive(shape).optimum
