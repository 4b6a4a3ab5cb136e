"""
Unit Tests for Closed-Form Bounds
"""
from fractions import Fraction

import pytest

from src.core.errors import PrecondError
from src.extremal.bounds import (
    boolean_algebra_grid_bound, boolean_algebra_square_bound, bound_catalog, dense_extraction_threshold,
    erdos_chain_bound, kleitman_union_free_bound, sperner_bound, strong_chain_bound, strong_multilevel_applies,
    strong_multilevel_bound, weak_grid_dimension,
)
from src.posets.poset_core import chain_poset, complete_multilevel


class TestFormulas:
    """Test exact evaluation of the bound formulas"""

    def test_strong_chain(self):
        assert strong_chain_bound(2, 2, 2) == 4

    def test_strong_multilevel(self):
        assert strong_multilevel_bound(2, 5, 2) == 320

    def test_strong_multilevel_applies(self):
        assert not strong_multilevel_applies(5, 2)
        assert strong_multilevel_applies(5, 1)
        assert not strong_multilevel_applies(1, 1)

    def test_sperner_and_erdos(self):
        assert sperner_bound(4) == 6
        assert erdos_chain_bound(4, 3) == 10
        assert erdos_chain_bound(4, 2) == sperner_bound(4)
        assert erdos_chain_bound(4, 1) == 0

    def test_erdos_needs_positive_chain(self):
        with pytest.raises(PrecondError):
            erdos_chain_bound(4, 0)

    def test_weak_grid_dimension(self):
        """ceil(2 log2 p) + 5"""
        assert weak_grid_dimension(1) == 5
        assert weak_grid_dimension(3) == 9
        assert weak_grid_dimension(4) == 9
        assert weak_grid_dimension(5) == 10

    def test_kleitman(self):
        assert kleitman_union_free_bound(4) == Fraction(10)

    def test_boolean_algebra_square(self):
        """One-dimensional algebras are comparable pairs: a single point in [k]"""
        assert boolean_algebra_square_bound(2, 1) == 1
        assert boolean_algebra_square_bound(4, 2) == pytest.approx(8)

    def test_boolean_algebra_grid(self):
        assert boolean_algebra_grid_bound(2, 4, 1) == pytest.approx(2 ** 3 / 2)
        assert boolean_algebra_grid_bound(3, 3, 3) == pytest.approx(3 ** (3 - 1 / 4) * 3 ** (-1 / 8))


class TestDenseThreshold:
    """Test the exact comparison against the irrational threshold"""

    def test_boundary(self):
        threshold = dense_extraction_threshold(4, 1, 2, 1)

        assert threshold.d == 2
        assert threshold.approx() == pytest.approx(96)
        assert not threshold.exceeded_by(96)
        assert threshold.exceeded_by(97)

    def test_step_zero(self):
        threshold = dense_extraction_threshold(3, 2, 2, 0)

        assert threshold.base == 8 * 2 * 1 * 3
        assert threshold.exceeded_by(49)
        assert not threshold.exceeded_by(48)


class TestCatalog:
    """Test the bound catalog for a poset"""

    def test_chain_in_boolean_lattice(self):
        cat = bound_catalog(chain_poset(3), 4, 2)

        assert cat.width == 6
        assert cat.get("sperner").value == 6
        assert cat.get("erdos_chain").value == 10
        assert cat.get("chain_grid").value == 12
        assert cat.get("strong_chain").value == 4 * 2 * 2 ** 3

    def test_asymptotic_entries_flagged(self):
        cat = bound_catalog(chain_poset(3), 4, 2)

        assert not cat.get("weak_asymptotic").exact
        assert cat.get("induced_main").value is None

    def test_height_two_entry(self):
        cat = bound_catalog(complete_multilevel([1, 3]), 6, 2)

        assert "a=1, b=3" in cat.get("induced_height_two").note

    def test_grid_catalog_has_no_boolean_only_entries(self):
        names = [e.name for e in bound_catalog(chain_poset(2), 3, 3).entries]

        assert "sperner" not in names
        assert "chain_grid" in names

    def test_boolean_algebra_entries(self):
        cat = bound_catalog(chain_poset(2), 3, 3, d=3)
        grid, square = cat.get("boolean_algebra"), cat.get("boolean_algebra_square")

        assert grid.applicable and square.applicable
        assert not grid.exact and not square.exact
        assert grid.value == pytest.approx(boolean_algebra_grid_bound(3, 3, 3))
        assert square.value == pytest.approx(3 ** 2.75)

    def test_boolean_algebra_ranges(self):
        cat = bound_catalog(chain_poset(2), 2, 3, d=3)

        assert not cat.get("boolean_algebra").applicable
        assert not cat.get("boolean_algebra_square").applicable
        assert cat.get("boolean_algebra_square").value == pytest.approx(3 ** 2.75)

    def test_boolean_algebra_in_cube(self):
        cat = bound_catalog(chain_poset(2), 4, 2, d=2)

        assert cat.get("boolean_algebra").applicable
        assert cat.get("boolean_algebra").value == pytest.approx(2 ** 3.5 * 4 ** -0.25)

    def test_bad_dimensions(self):
        with pytest.raises(PrecondError):
            bound_catalog(chain_poset(2), 0, 2)
        with pytest.raises(PrecondError):
            bound_catalog(chain_poset(2), 3, 2, d=0)
