"""
Unit Tests for Copy Detection
"""
import random

import pytest

from src.core.errors import BudgetExceeded, InputError
from src.detectors.copy_finder import (
    CopyMode, Embedding, family_index, find_copy, find_copy_exhaustive, verify_embedding,
)
from src.grids.grid_core import Family, GridShape
from src.posets.poset_core import antichain_poset, boolean_lattice, chain_poset


@pytest.fixture
def square():
    return Family.full(GridShape((2, 2)))


class TestFindCopy:
    """Test weak, induced and strong copies"""

    def test_weak_chain(self, square):
        e = find_copy(square, chain_poset(3), CopyMode.WEAK)

        assert e is not None
        assert verify_embedding(square, chain_poset(3), e)
        assert e.as_dict()["c1"] == (1, 1)
        assert e.as_dict()["c3"] == (2, 2)

    def test_strong_chain_needs_room(self, square):
        assert find_copy(square, chain_poset(2), CopyMode.STRONG) is not None
        assert find_copy(square, chain_poset(3), CopyMode.STRONG) is None

    def test_induced_v(self, square, v_poset):
        e = find_copy(square, v_poset, CopyMode.INDUCED)

        assert e is not None
        assert e.as_dict()["a"] == (1, 1)
        assert {e.as_dict()["b"], e.as_dict()["c"]} == {(1, 2), (2, 1)}

    def test_induced_antichain_not_in_chain(self):
        F = Family.from_points(GridShape((3, 3)), [(1, 1), (2, 2), (3, 3)])

        assert find_copy(F, antichain_poset(2), CopyMode.INDUCED) is None
        assert find_copy(F, antichain_poset(2), CopyMode.WEAK) is not None

    def test_diamond_in_cube(self, diamond):
        F = Family.full(GridShape((2, 2, 2)))

        for mode in CopyMode:
            e = find_copy(F, diamond, mode)
            if mode is CopyMode.STRONG:
                assert e is None
            else:
                assert verify_embedding(F, diamond, e)

    def test_too_few_members(self, square):
        assert find_copy(square, chain_poset(5), CopyMode.WEAK) is None

    def test_empty_poset(self, square):
        e = find_copy(square, antichain_poset(0), CopyMode.WEAK)

        assert e is not None
        assert e.mapping == ()

    def test_must_use(self, square):
        e = find_copy(square, chain_poset(2), CopyMode.WEAK, must_use=(2, 1))

        assert (2, 1) in e.image()

    def test_must_use_outside_family(self):
        F = Family.from_points(GridShape((2, 2)), [(1, 1)])

        with pytest.raises(InputError):
            find_copy(F, chain_poset(1), CopyMode.WEAK, must_use=(2, 2))

    def test_threads_match_sequential(self):
        F = Family.full(GridShape((3, 3)))
        P = boolean_lattice(2)

        assert find_copy(F, P, CopyMode.STRONG, threads=4) == find_copy(F, P, CopyMode.STRONG, threads=1)

    def test_budget(self):
        F = Family.full(GridShape((4, 4)))

        with pytest.raises(BudgetExceeded):
            find_copy(F, chain_poset(8), CopyMode.STRONG, budget=5)

    @staticmethod
    def _outcome(F, P, mode, budget, threads):
        try:
            return find_copy(F, P, mode, budget=budget, threads=threads)
        except BudgetExceeded as e:
            return ("budget", e.nodes)

    @pytest.mark.parametrize("seed", [3, 11, 29])
    def test_budget_outcome_independent_of_threads(self, seed, diamond):
        """An early branch running out of nodes wins over a later branch that succeeds"""
        rng = random.Random(seed)
        shape = GridShape.uniform(3, 3)
        F = Family.from_indices(shape, rng.sample(range(shape.size), 14))

        cases = ((diamond, CopyMode.INDUCED), (chain_poset(4), CopyMode.WEAK), (chain_poset(3), CopyMode.STRONG))
        for P, mode in cases:
            for budget in range(0, 60):
                sequential = self._outcome(F, P, mode, budget, threads=1)
                assert self._outcome(F, P, mode, budget, threads=3) == sequential


class TestOracle:
    """Test the exhaustive oracle and verification"""

    def test_agrees_on_small_instances(self, v_poset, diamond):
        F = Family.from_points(GridShape((3, 3)), [(1, 1), (1, 3), (2, 2), (3, 1), (3, 3)])

        for P in (v_poset, diamond, chain_poset(3), antichain_poset(3)):
            for mode in CopyMode:
                fast = find_copy(F, P, mode)
                slow = find_copy_exhaustive(F, P, mode)
                assert (fast is None) == (slow is None)

    def test_verify_rejects_wrong_order(self, square):
        e = Embedding.from_dict(CopyMode.WEAK, {"c1": (2, 2), "c2": (1, 1)})

        assert not verify_embedding(square, chain_poset(2), e)

    def test_verify_rejects_non_member(self):
        F = Family.from_points(GridShape((2, 2)), [(1, 1)])
        e = Embedding.from_dict(CopyMode.WEAK, {"c1": (1, 1), "c2": (2, 2)})

        assert not verify_embedding(F, chain_poset(2), e)

    def test_verify_rejects_repeated_point(self, square):
        e = Embedding.from_dict(CopyMode.WEAK, {"a1": (1, 1), "a2": (1, 1)})

        assert not verify_embedding(square, antichain_poset(2), e)


class TestFamilyIndex:
    """Test member order masks"""

    def test_masks(self, square):
        index = family_index(square)
        low = index.position[(1, 1)]
        top = index.position[(2, 2)]

        assert index.up[low] >> top & 1
        assert index.strict_up[low] >> top & 1
        assert not index.strict_up[low] >> index.position[(1, 2)] & 1
        assert index.down[top] >> low & 1
