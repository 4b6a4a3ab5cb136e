"""
Unit Tests for Widths, Chain Partitions and Grid Partitions
"""
import numpy as np
import pytest

from src.core.errors import PrecondError
from src.decomposition.chains import (
    long_chain_target, partition_long_chains, symmetric_chain_decomposition,
)
from src.decomposition.grids import (
    densest_subgrid, densest_subgrid_array, factor_dimensions, join_free_certificate,
    partition_into_grids, reduce_dimension_bound,
)
from src.decomposition.width import grid_width, grid_width_dilworth, rank_profile, width_estimate
from src.grids.grid_core import Family, GridShape


class TestWidth:
    """Test exact widths of grids"""

    def test_rank_profiles(self):
        assert rank_profile(GridShape((2, 2, 2))) == [1, 3, 3, 1]
        assert rank_profile(GridShape((3, 3))) == [1, 2, 3, 2, 1]

    @pytest.mark.parametrize("sides,expected", [
        ((2, 2, 2, 2), 6),
        ((3, 3), 3),
        ((2, 3), 2),
        ((3, 3, 3), 7),
        ((5,), 1),
    ])
    def test_grid_width(self, sides, expected):
        assert grid_width(GridShape(sides)) == expected

    def test_dilworth_agrees(self):
        for sides in ((2, 2, 2), (3, 4), (2, 3, 3)):
            shape = GridShape(sides)
            assert grid_width_dilworth(shape) == max(rank_profile(shape))

    def test_estimate(self):
        est = width_estimate(GridShape.uniform(3, 4))

        assert est.exact == 19
        assert est.estimate == pytest.approx(27 / 2)
        assert est.ratio == pytest.approx(19 / 13.5)

    def test_estimate_needs_k2(self):
        with pytest.raises(PrecondError):
            width_estimate(GridShape.uniform(1, 3))


class TestChainPartitions:
    """Test symmetric chain decompositions and long-chain partitions"""

    def test_scd_is_symmetric(self):
        shape = GridShape((2, 2, 2))
        scd = symmetric_chain_decomposition(shape)
        top = sum(k - 1 for k in shape.sides)

        assert scd.count == grid_width(shape)
        assert sorted(scd.sizes) == [2, 2, 4]
        for chain in scd.chains:
            ranks = [sum(x) - shape.n for x in chain]
            assert ranks == list(range(ranks[0], ranks[-1] + 1))
            assert ranks[0] + ranks[-1] == top

    def test_scd_mixed_sides(self):
        scd = symmetric_chain_decomposition(GridShape((2, 3, 4)))

        assert scd.count == grid_width(GridShape((2, 3, 4)))

    def test_target(self):
        assert long_chain_target(GridShape.uniform(2, 4)) == 1
        assert long_chain_target(GridShape.uniform(3, 3)) == 2
        assert long_chain_target(GridShape.uniform(4, 2)) == 2

    @pytest.mark.parametrize("k,n", [(2, 4), (3, 3), (4, 2), (5, 2)])
    def test_long_chains(self, k, n):
        """w chains, each at least the target"""
        shape = GridShape.uniform(k, n)
        partition = partition_long_chains(shape)

        assert partition.count == grid_width(shape)
        assert partition.min_size >= long_chain_target(shape)
        assert sum(partition.sizes) == shape.size

    def test_requires_uniform(self):
        with pytest.raises(PrecondError):
            partition_long_chains(GridShape((2, 3)))


class TestGridPartitions:
    """Test partitions into products of long chains"""

    def test_factor_dimensions(self):
        assert factor_dimensions(5, 2) == (3, 2)
        assert factor_dimensions(4, 4) == (1, 1, 1, 1)
        assert factor_dimensions(7, 3) == (3, 2, 2)

    def test_partition_covers_grid(self):
        shape = GridShape.uniform(2, 4)
        partition = partition_into_grids(shape, 2, threads=2)

        assert partition.m == (2, 2)
        assert len(partition.parts) == 4
        assert sum(part.size for part in partition.parts) == 16
        assert partition.verify()

    def test_part_count_is_product_of_widths(self):
        shape = GridShape.uniform(3, 3)
        partition = partition_into_grids(shape, 2)

        assert len(partition.parts) == grid_width(GridShape.uniform(3, 2)) * grid_width(GridShape.uniform(3, 1))

    def test_d_out_of_range(self):
        with pytest.raises(PrecondError):
            partition_into_grids(GridShape.uniform(2, 3), 4)

    def test_d_one_bound_is_width(self):
        shape = GridShape.uniform(2, 4)

        assert reduce_dimension_bound(shape, 1, 1).value == grid_width(shape)

    def test_join_free_certificate_covers_optimum(self):
        assert join_free_certificate(GridShape.uniform(2, 2)) >= 3


class TestDensestSubgrid:
    """Test the averaging step over a part"""

    def test_finds_dense_corner(self):
        arr = np.zeros((3, 3), dtype=bool)
        arr[:2, :2] = True
        dense = densest_subgrid_array(arr, 2)

        assert dense.count == 4
        assert dense.selection == ((0, 1), (0, 1))

    def test_at_least_average(self, rng):
        arr = np.array([[rng.random() < 0.4 for _ in range(5)] for _ in range(4)])
        dense = densest_subgrid_array(arr, 3)

        assert dense.count >= dense.target

    def test_m_too_large(self):
        with pytest.raises(PrecondError):
            densest_subgrid_array(np.ones((2, 3), dtype=bool), 3)

    def test_on_part(self):
        shape = GridShape.uniform(2, 2)
        part = partition_into_grids(shape, 2).parts[0]
        F = Family.full(shape)

        assert densest_subgrid(part, F, 2).count == 4
