"""
Column witnesses under a scale ladder.

For x in F and a scale i, the above-witness x^(i) is the member y of x's
column (same first n-1 coordinates) with x ->_i y, and the below-witness
x^(-i) the member y with y ->_i x. When several exist the one with the
smallest final coordinate is taken.
"""
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.grids.grid_core import Family, Point, ScaleLadder


@dataclass(frozen=True)
class WitnessTable:
    """above[x][i-1] / below[x][i-1] hold the final coordinate of x^(i) / x^(-i), or None."""
    family: Family
    ladder: ScaleLadder
    h: int
    above: Dict[Point, Tuple[Optional[int], ...]]
    below: Dict[Point, Tuple[Optional[int], ...]]

    def witness(self, x: Point, i: int) -> Point:
        """x^(i) for i in 1..h, x^(-i) for negative i."""
        final = self.above[x][i - 1] if i > 0 else self.below[x][-i - 1]
        if final is None:
            raise KeyError(f"{x} has no witness at scale {i}")
        return x[:-1] + (final,)

    def is_good(self, x: Point) -> bool:
        return None not in self.above[x] and None not in self.below[x]

    def good(self) -> Family:
        return Family.from_points(self.family.shape, (x for x in self.above if self.is_good(x)))

    def missing(self, i: int) -> Family:
        """H_i: members lacking x^(i) or x^(-i)."""
        return Family.from_points(
            self.family.shape,
            (x for x in self.above if self.above[x][i - 1] is None or self.below[x][i - 1] is None),
        )


def _column_witnesses(col, a: int, ladder: ScaleLadder, i: int):
    outer = ladder.width(i)
    inner = ladder.width(i - 1)
    outer_start = (a - 1) // outer * outer + 1
    outer_end = outer_start + outer - 1
    inner_start = (a - 1) // inner * inner + 1
    inner_end = inner_start + inner - 1

    up = None
    j = bisect_right(col, inner_end)
    if j < len(col) and col[j] <= outer_end:
        up = col[j]
    down = None
    j = bisect_left(col, outer_start)
    if j < len(col) and col[j] < inner_start:
        down = col[j]
    return up, down


def witness_table(F: Family, ladder: ScaleLadder, h: int) -> WitnessTable:
    arr = F.to_array()
    k = F.shape.sides[-1]
    columns = arr.reshape(-1, k)
    prefix_shape = F.shape.sides[:-1]
    above: Dict[Point, Tuple[Optional[int], ...]] = {}
    below: Dict[Point, Tuple[Optional[int], ...]] = {}
    for c, row in enumerate(columns):
        col = [int(t) + 1 for t in np.flatnonzero(row)]
        if not col:
            continue
        prefix = tuple(int(v) + 1 for v in np.unravel_index(c, prefix_shape)) if prefix_shape else ()
        for a in col:
            ups, downs = zip(*(_column_witnesses(col, a, ladder, i) for i in range(1, h + 1))) if h else ((), ())
            above[prefix + (a,)] = tuple(ups)
            below[prefix + (a,)] = tuple(downs)
    return WitnessTable(F, ladder, h, above, below)


def good_elements(F: Family, ladder: ScaleLadder, h: int) -> Family:
    return witness_table(F, ladder, h).good()


def missing_witnesses(F: Family, ladder: ScaleLadder, i: int) -> Family:
    return witness_table(F, ladder, i).missing(i)
