"""
Unit Tests for Constant Schedules
"""
import math
from fractions import Fraction

import pytest

from src.core.errors import PrecondError
from src.extremal.constants import base_dimension, compute_constants, exp_lower_bound
from src.posets.poset_core import antichain_poset, chain_poset, complete_multilevel


class TestBaseDimension:
    """Test the smallest d0 with 2^(d0-2)/(d0+1) >= r"""

    @pytest.mark.parametrize("r,expected", [(1, 5), (2, 6), (3, 7), (10, 9)])
    def test_values(self, r, expected):
        assert base_dimension(r) == expected

    def test_is_smallest(self):
        for r in range(1, 30):
            d = base_dimension(r)
            assert Fraction(2) ** (d - 2) >= r * (d + 1)
            assert Fraction(2) ** (d - 3) < r * d

    def test_r_positive(self):
        with pytest.raises(PrecondError):
            base_dimension(0)


class TestSchedules:
    """Test s_i, C_l and the growth certificate"""

    def test_single_element(self):
        consts = compute_constants(chain_poset(1))

        assert (consts.h, consts.p, consts.r, consts.q) == (1, 1, 1, 0)
        assert consts.s(0) == 1
        assert consts.C == (Fraction(2),)
        assert consts.exponent_proxy is None

    def test_two_chain(self):
        consts = compute_constants(chain_poset(2))
        e1 = (100 * 8 * 2) ** 8

        assert consts.s_exponents[0] == 0
        assert consts.s_exponents[1] == e1.bit_length()
        assert consts.C0 == 2 * 4 * 8 * consts.s(1) ** 2
        assert consts.Cq == 9 * consts.C0
        assert consts.growth_within_bound()

    def test_top_scale_follows_recurrence(self):
        consts = compute_constants(chain_poset(2))
        e1 = consts.s_exponents[1]

        assert len(consts.s_exponents) == consts.h + 1
        assert consts.grid_side_exponent == consts.s_exponents[2]
        assert consts.s_exponents[2] == ((100 * 8 * 2) ** 8).bit_length() + 8 * e1

    def test_s_grows(self):
        consts = compute_constants(complete_multilevel([2, 2]))

        assert list(consts.s_exponents) == sorted(set(consts.s_exponents))
        assert consts.d0 == base_dimension(2)

    def test_C_is_geometric(self):
        P = complete_multilevel([1, 2, 1])
        consts = compute_constants(P)
        ratio = 1 + Fraction(8 * 3, 4)

        assert len(consts.C) == consts.q + 1
        for a, b in zip(consts.C, consts.C[1:]):
            assert b == a * ratio

    def test_antichain(self):
        consts = compute_constants(antichain_poset(3))

        assert consts.h == 1
        assert consts.q == 0
        assert consts.C0 == 54
        assert consts.exponent_proxy == pytest.approx(math.log(54, 3))

    def test_empty_rejected(self):
        with pytest.raises(PrecondError):
            compute_constants(antichain_poset(0))


class TestExpLowerBound:
    def test_partial_sums(self):
        assert exp_lower_bound(Fraction(1), 0) == 1
        assert exp_lower_bound(Fraction(1), 2) == Fraction(5, 2)
        assert exp_lower_bound(Fraction(2), 3) == Fraction(19, 3)
