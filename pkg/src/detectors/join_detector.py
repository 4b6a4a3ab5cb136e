"""
Join triples u = v | w (coordinatewise maximum) with u, v, w distinct members.
"""
from dataclasses import dataclass
from itertools import permutations
from typing import Optional

import numpy as np

from src.core.config import CONF
from src.core.errors import BudgetExceeded, ExtractionFailed, ShapeError
from src.grids.grid_core import Family, Point, join
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class JoinTriple:
    u: Point
    v: Point
    w: Point

    def is_valid_in(self, F: Family) -> bool:
        distinct = len({self.u, self.v, self.w}) == 3
        return distinct and all(x in F for x in (self.u, self.v, self.w)) and join(self.v, self.w) == self.u


def find_join_triple(F: Family, budget: Optional[int] = None) -> Optional[JoinTriple]:
    """First triple over member pairs (v, w) in rank order whose join is a third member.

    Comparable pairs are skipped since their join is one of the pair.
    """
    budget = CONF.budget if budget is None else budget
    coords = F.coords()
    m = len(coords)
    if m < 3:
        return None
    flat = F.to_array().reshape(-1)
    strides = np.array(F.shape.strides, dtype=np.int64)
    pairs = 0
    for i in range(m - 1):
        rest = coords[i + 1:]
        joins = np.maximum(coords[i], rest)
        pairs += len(rest)
        if pairs > budget:
            raise BudgetExceeded(pairs)
        incomparable = (joins != coords[i]).any(axis=1) & (joins != rest).any(axis=1)
        hit = incomparable & flat[(joins - 1) @ strides]
        if hit.any():
            j = int(np.flatnonzero(hit)[0])
            v = tuple(int(c) for c in coords[i])
            w = tuple(int(c) for c in rest[j])
            return JoinTriple(join(v, w), v, w)
    return None


def find_join_triple_exhaustive(F: Family) -> Optional[JoinTriple]:
    for u, v, w in permutations(F.points(), 3):
        if join(v, w) == u:
            return JoinTriple(u, v, w)
    return None


# ==================== Bad elements in two dimensions ====================

@dataclass(frozen=True)
class BadElements:
    """x-bad: smallest first coordinate among members sharing the second.
    y-bad: smallest second coordinate among members sharing the first."""
    x_bad: Family
    y_bad: Family

    def neither(self, F: Family) -> Family:
        return F - self.x_bad - self.y_bad


def find_bad_elements_2d(F: Family) -> BadElements:
    if F.shape.n != 2:
        raise ShapeError(f"bad elements are defined on 2-dimensional grids, got {F.shape.n}")
    arr = F.to_array()
    x_bad = np.zeros_like(arr)
    y_bad = np.zeros_like(arr)
    first_in_col = arr.argmax(axis=0)
    for b in np.flatnonzero(arr.any(axis=0)):
        x_bad[first_in_col[b], b] = True
    first_in_row = arr.argmax(axis=1)
    for a in np.flatnonzero(arr.any(axis=1)):
        y_bad[a, first_in_row[a]] = True
    return BadElements(Family.from_array(F.shape, x_bad), Family.from_array(F.shape, y_bad))


def join_from_bad_elements(F: Family) -> Optional[JoinTriple]:
    """A member that is neither x-bad nor y-bad is the join of the members left of and below it."""
    bad = find_bad_elements_2d(F)
    for u in bad.neither(F):
        a, b = u
        v = next((a2, b) for a2 in range(1, a) if (a2, b) in F)
        w = next((a, b2) for b2 in range(1, b) if (a, b2) in F)
        triple = JoinTriple(u, v, w)
        if not triple.is_valid_in(F):
            raise ExtractionFailed(f"bad-element replay produced an invalid triple {triple}")
        return triple
    if len(F) > sum(F.shape.sides):
        raise ExtractionFailed(f"{len(F)} members exceed k+l yet every member is bad")
    return None
