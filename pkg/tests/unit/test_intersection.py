"""
Unit Tests for Intersection Selection
"""
from fractions import Fraction

import pytest

from src.core.errors import PrecondError
from src.extremal.intersection import SetSystem, intersection_bound, intersection_select


def _system(sets, alpha="1/3", ground=range(12)):
    return SetSystem.build(ground, sets, alpha)


class TestIntersectionSelect:
    """Test choosing h sets with a large common intersection"""

    def test_identical_sets(self):
        system = _system([range(6)] * 12)
        choice = intersection_select(system, 2)

        assert choice.indices == (1, 2)
        assert choice.intersection == frozenset(range(6))
        assert choice.size >= choice.bound

    def test_single_set_is_largest(self):
        system = _system([range(4), range(7), range(5), range(4), range(4), range(4)])
        choice = intersection_select(system, 1)

        assert choice.indices == (2,)
        assert choice.size == 7

    def test_random_systems(self, rng):
        alpha = Fraction(1, 4)
        for _ in range(20):
            sets = [rng.sample(range(40), rng.randint(10, 40)) for _ in range(16)]
            system = SetSystem.build(range(40), sets, alpha)
            choice = intersection_select(system, 2)
            assert len(choice.indices) == 2
            assert choice.size >= intersection_bound(alpha, 2, 40)

    def test_bound(self):
        assert intersection_bound(Fraction(1, 4), 1, 48 * 48) == 1


class TestPreconditions:
    def test_alpha_range(self):
        with pytest.raises(PrecondError):
            intersection_select(_system([range(6)] * 12, alpha="1/2"), 1)

    def test_too_few_sets(self):
        with pytest.raises(PrecondError):
            intersection_select(_system([range(6)] * 5), 1)

    def test_small_subset(self):
        with pytest.raises(PrecondError):
            _system([range(2)])

    def test_subset_outside_ground(self):
        with pytest.raises(PrecondError):
            _system([range(10, 16)])
