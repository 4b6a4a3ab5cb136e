"""
Partitions of [k]^n into d-dimensional grids whose sides are long chains,
and the averaging arguments run over them.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import comb, prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.config import CONF
from src.core.errors import InvariantViolation, PrecondError
from src.core.workers import run_ordered
from src.decomposition.chains import Chain, ChainPartition, partition_long_chains
from src.grids.grid_core import Family, GridShape, NaturalBijection, Point
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class GridPart:
    """G_i = C_{i,1} x ... x C_{i,d}, each C_{i,j} a chain of [k]^{m_j}."""
    chains: Tuple[Chain, ...]

    @property
    def sides(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.chains)

    @property
    def size(self) -> int:
        return prod(self.sides)

    @property
    def min_side(self) -> int:
        return min(self.sides)

    @cached_property
    def bijection(self) -> NaturalBijection:
        return NaturalBijection(self.chains)

    def points(self) -> List[Point]:
        return [self.bijection.embed(p) for p in self.bijection.image_shape.points()]


@dataclass(frozen=True)
class GridPartition:
    shape: GridShape
    d: int
    m: Tuple[int, ...]
    factors: Tuple[ChainPartition, ...]
    parts: Tuple[GridPart, ...]

    def verify(self) -> bool:
        seen = set()
        for part in self.parts:
            if not part.bijection.verify():
                return False
            for x in part.points():
                if x in seen or not self.shape.contains(x):
                    return False
                seen.add(x)
        return len(seen) == self.shape.size


def factor_dimensions(n: int, d: int) -> Tuple[int, ...]:
    """m_1..m_d summing to n; the ceil(n/d) values come first."""
    q, r = divmod(n, d)
    return tuple(q + 1 if j < r else q for j in range(d))


def partition_into_grids(shape: GridShape, d: int, threads: Optional[int] = None) -> GridPartition:
    k = shape.side
    if not 1 <= d <= shape.n:
        raise PrecondError(f"need 1 <= d <= n, got d={d}, n={shape.n}")
    m = factor_dimensions(shape.n, d)
    dims = sorted(set(m))
    solved = run_ordered(lambda mj: partition_long_chains(GridShape.uniform(k, mj)), dims, threads)
    by_dim: Dict[int, ChainPartition] = dict(zip(dims, solved))
    factors = tuple(by_dim[mj] for mj in m)
    parts = tuple(GridPart(tuple(combo)) for combo in product(*(f.chains for f in factors)))
    partition = GridPartition(shape, d, m, factors, parts)
    if not partition.verify():
        raise InvariantViolation(f"grid partition of {shape.sides} with d={d} is not a product cover")
    logger.debug("grid partition %s d=%d: m=%s parts=%d", shape.sides, d, m, len(parts))
    return partition


# ==================== Averaging over parts ====================

@dataclass(frozen=True)
class DenseSubgrid:
    selection: Tuple[Tuple[int, ...], ...]
    count: int
    target: int

    def chains(self, part: GridPart) -> Tuple[Chain, ...]:
        return tuple(tuple(c[i] for i in sel) for c, sel in zip(part.chains, self.selection))


def part_indicator(part: GridPart, F: Family) -> np.ndarray:
    arr = np.zeros(part.sides, dtype=bool)
    for idx in np.ndindex(*part.sides):
        arr[idx] = part.bijection.embed(tuple(i + 1 for i in idx)) in F
    return arr


def _count(arr: np.ndarray, selection: Sequence[Sequence[int]]) -> int:
    return int(arr[np.ix_(*selection)].sum())


def _top_m(arr: np.ndarray, selection: List[List[int]], axis: int, m: int) -> List[int]:
    free = list(selection)
    free[axis] = list(range(arr.shape[axis]))
    sub = arr[np.ix_(*free)]
    others = tuple(j for j in range(arr.ndim) if j != axis)
    marginals = sub.sum(axis=others) if others else sub.astype(np.int64)
    order = np.argsort(-marginals, kind="stable")[:m]
    return sorted(int(i) for i in order)


def densest_subgrid_array(arr: np.ndarray, m: int) -> DenseSubgrid:
    """Densest m x ... x m subgrid of a boolean array by per-axis marginal selection."""
    if m < 1 or any(s < m for s in arr.shape):
        raise PrecondError(f"m={m} exceeds a side of {arr.shape}")
    total = int(arr.sum())
    size = arr.size
    target = -(-(total * m ** arr.ndim) // size)

    selection = [list(range(s)) for s in arr.shape]
    for axis in range(arr.ndim):
        selection[axis] = _top_m(arr, selection, axis, m)
    best = _count(arr, selection)

    improved = True
    while improved:
        improved = False
        for axis in range(arr.ndim):
            trial = list(selection)
            trial[axis] = _top_m(arr, selection, axis, m)
            value = _count(arr, trial)
            if value > best:
                selection, best, improved = trial, value, True

    if best < target and prod(comb(s, m) for s in arr.shape) <= CONF.subgrid_exhaustive_limit:
        for trial in product(*(combinations(range(s), m) for s in arr.shape)):
            value = _count(arr, trial)
            if value > best:
                selection, best = [list(t) for t in trial], value
    if best < target:
        raise InvariantViolation(f"densest subgrid count {best} below the average {target}")
    return DenseSubgrid(tuple(tuple(s) for s in selection), best, target)


def densest_subgrid(part: GridPart, F: Family, m: int) -> DenseSubgrid:
    if m > part.min_side:
        raise PrecondError(f"m={m} exceeds the smallest side {part.min_side}")
    return densest_subgrid_array(part_indicator(part, F), m)


# ==================== Certified bounds ====================

@dataclass(frozen=True)
class DimensionBound:
    value: Fraction
    terms: Tuple[Fraction, ...]
    partition: GridPartition


def reduce_dimension_bound(shape: GridShape, d: int, C: Union[int, Fraction]) -> DimensionBound:
    """Sum over parts of C*|G_i|/m_i, m_i the smallest side of G_i."""
    partition = partition_into_grids(shape, d)
    terms = tuple(Fraction(C) * part.size / part.min_side for part in partition.parts)
    return DimensionBound(sum(terms, Fraction(0)), terms, partition)


def join_free_certificate(shape: GridShape) -> int:
    """Sum of |C_i1| + |C_i2| over a 2-dimensional partition; bounds join-free families."""
    partition = partition_into_grids(shape, 2)
    return sum(sum(part.sides) for part in partition.parts)
