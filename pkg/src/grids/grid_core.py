"""
Grids [k1] x ... x [kn] with the componentwise order.

Points are 1-indexed tuples. A Family is an immutable bitset over the
mixed-radix rank of points, coordinate 1 most significant, which is the
C-order flattening numpy uses for an array of shape `sides`.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import CONF
from src.core.errors import (
    DivisibilityError, InputError, NotAChain, PrecondError, RangeError, ShapeMismatch, SizeError,
)

Point = Tuple[int, ...]


class Comparison(str, Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class Relation(str, Enum):
    EQUIV = "equiv"
    ARROW = "arrow"
    NEITHER = "neither"


# ==================== Shapes ====================

@dataclass(frozen=True)
class GridShape:
    sides: Tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(k) for k in self.sides)
        if any(k < 1 for k in sides):
            raise InputError(f"grid sides must be positive, got {sides}")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def uniform(cls, k: int, n: int) -> "GridShape":
        return cls((k,) * n)

    @property
    def n(self) -> int:
        return len(self.sides)

    @property
    def size(self) -> int:
        return math.prod(self.sides)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.sides)) <= 1

    @property
    def side(self) -> int:
        if not self.is_uniform or not self.sides:
            raise ShapeMismatch(f"shape {self.sides} is not a uniform [k]^n")
        return self.sides[0]

    @cached_property
    def strides(self) -> Tuple[int, ...]:
        strides = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            strides[i] = strides[i + 1] * self.sides[i + 1]
        return tuple(strides)

    def check_cap(self, cap: Optional[int] = None):
        cap = CONF.max_grid_points if cap is None else cap
        if self.size > cap:
            raise SizeError(f"grid {self.sides} has {self.size} points, cap is {cap}")

    def contains(self, point: Sequence[int]) -> bool:
        return len(point) == self.n and all(1 <= x <= k for x, k in zip(point, self.sides))

    def rank(self, point: Sequence[int]) -> int:
        if len(point) != self.n:
            raise ShapeMismatch(f"point {tuple(point)} does not have {self.n} coordinates")
        if not self.contains(point):
            raise RangeError(f"point {tuple(point)} is outside {self.sides}")
        return sum((x - 1) * s for x, s in zip(point, self.strides))

    def unrank(self, index: int) -> Point:
        return tuple(index // s % k + 1 for s, k in zip(self.strides, self.sides))

    def points(self) -> Iterator[Point]:
        return product(*(range(1, k + 1) for k in self.sides))

    def drop_axis(self, axis: int) -> "GridShape":
        return GridShape(self.sides[:axis - 1] + self.sides[axis:])

    @cached_property
    def coordinates(self) -> np.ndarray:
        """All points as a (size, n) array in rank order."""
        if self.n == 0:
            return np.zeros((1, 0), dtype=np.int64)
        return np.indices(self.sides).reshape(self.n, -1).T + 1


# ==================== Families ====================

@dataclass(frozen=True)
class Family:
    shape: GridShape
    bits: int = 0

    def __post_init__(self):
        self.shape.check_cap()
        if self.bits < 0 or self.bits.bit_length() > self.shape.size:
            raise RangeError("bitset does not fit the shape")

    @classmethod
    def empty(cls, shape: GridShape) -> "Family":
        return cls(shape, 0)

    @classmethod
    def full(cls, shape: GridShape) -> "Family":
        return cls(shape, (1 << shape.size) - 1)

    @classmethod
    def from_points(cls, shape: GridShape, points: Iterable[Sequence[int]]) -> "Family":
        return cls.from_indices(shape, (shape.rank(tuple(point)) for point in points))

    @classmethod
    def from_indices(cls, shape: GridShape, indices: Iterable[int]) -> "Family":
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= shape.size):
            raise RangeError(f"index outside 0..{shape.size - 1}")
        mask = np.zeros(shape.size, dtype=bool)
        mask[idx] = True
        return cls.from_array(shape, mask)

    @classmethod
    def from_array(cls, shape: GridShape, mask: np.ndarray) -> "Family":
        flat = np.asarray(mask, dtype=bool).reshape(-1)
        if flat.size != shape.size:
            raise ShapeMismatch("mask size does not match the shape")
        return cls(shape, int.from_bytes(np.packbits(flat, bitorder="little").tobytes(), "little"))

    def to_array(self) -> np.ndarray:
        nbytes = (self.shape.size + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        flat = np.unpackbits(raw, bitorder="little")[: self.shape.size].astype(bool)
        return flat.reshape(self.shape.sides)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, point) -> bool:
        point = tuple(point)
        return self.shape.contains(point) and bool(self.bits >> self.shape.rank(point) & 1)

    def indices(self) -> Iterator[int]:
        return iter(np.flatnonzero(self.to_array().reshape(-1)).tolist())

    def __iter__(self) -> Iterator[Point]:
        return (self.shape.unrank(i) for i in self.indices())

    def points(self) -> List[Point]:
        return list(self)

    def coords(self) -> np.ndarray:
        """Member points as an (m, n) int array in rank order."""
        idx = np.fromiter(self.indices(), dtype=np.int64, count=len(self))
        return self.shape.coordinates[idx].reshape(len(idx), self.shape.n)

    def _same_shape(self, other: "Family"):
        if self.shape != other.shape:
            raise ShapeMismatch(f"families over {self.shape.sides} and {other.shape.sides}")

    def __or__(self, other: "Family") -> "Family":
        self._same_shape(other)
        return Family(self.shape, self.bits | other.bits)

    def __and__(self, other: "Family") -> "Family":
        self._same_shape(other)
        return Family(self.shape, self.bits & other.bits)

    def __sub__(self, other: "Family") -> "Family":
        self._same_shape(other)
        return Family(self.shape, self.bits & ~other.bits)

    def with_point(self, point: Sequence[int]) -> "Family":
        return Family(self.shape, self.bits | 1 << self.shape.rank(tuple(point)))

    def restrict(self, mask: int) -> "Family":
        return Family(self.shape, self.bits & mask)


# ==================== Order and lattice operations ====================

def _check_dims(a: Sequence[int], b: Sequence[int]):
    if len(a) != len(b):
        raise ShapeMismatch(f"{tuple(a)} and {tuple(b)} have different dimensions")


def precedes(a: Sequence[int], b: Sequence[int]) -> bool:
    """a <= b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def strictly_below(a: Sequence[int], b: Sequence[int]) -> bool:
    """a < b in every coordinate."""
    return all(x < y for x, y in zip(a, b))


def compare(a: Sequence[int], b: Sequence[int]) -> Comparison:
    _check_dims(a, b)
    le = precedes(a, b)
    ge = precedes(b, a)
    if le and ge:
        return Comparison.EQUAL
    if le:
        return Comparison.LESS
    if ge:
        return Comparison.GREATER
    return Comparison.INCOMPARABLE


def join(v: Sequence[int], w: Sequence[int]) -> Point:
    _check_dims(v, w)
    return tuple(max(x, y) for x, y in zip(v, w))


def disjoint(v: Sequence[int], w: Sequence[int]) -> bool:
    """Offsets are disjoint when no coordinate is nonzero in both."""
    _check_dims(v, w)
    return all(x == 0 or y == 0 for x, y in zip(v, w))


# ==================== Blocks, slices, projections ====================

@dataclass(frozen=True)
class BlockGrid:
    """Blocks B_u = {s*u - v : v in {0..s-1}^n} for u in the index grid."""
    shape: GridShape
    side: int
    _masks: Dict[Point, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def index_shape(self) -> GridShape:
        return GridShape(tuple(k // self.side for k in self.shape.sides))

    def blocks(self) -> Iterator[Point]:
        return self.index_shape.points()

    def block(self, u: Sequence[int]) -> List[Point]:
        s = self.side
        offsets = product(range(s - 1, -1, -1), repeat=self.shape.n)
        return [tuple(s * ui - vi for ui, vi in zip(u, v)) for v in offsets]

    def block_of(self, x: Sequence[int]) -> Point:
        return tuple((xi - 1) // self.side + 1 for xi in x)

    def local(self, x: Sequence[int]) -> Point:
        """Position of x inside its block, in [s]^n."""
        return tuple((xi - 1) % self.side + 1 for xi in x)

    def block_mask(self, u: Sequence[int]) -> int:
        u = tuple(u)
        if u not in self._masks:
            mask = 0
            for x in self.block(u):
                mask |= 1 << self.shape.rank(x)
            self._masks[u] = mask
        return self._masks[u]

    def members(self, F: Family, u: Sequence[int]) -> Family:
        return F.restrict(self.block_mask(u))

    def projection(self, F: Family, u: Sequence[int]) -> Family:
        """pr(B_u & F): local positions in [s]^(n-1), last coordinate dropped."""
        local_shape = GridShape((self.side,) * (self.shape.n - 1))
        return Family.from_points(local_shape, {self.local(x)[:-1] for x in self.members(F, u)})


def block_decompose(shape: GridShape, s: int) -> BlockGrid:
    if s < 1 or any(k % s for k in shape.sides):
        raise DivisibilityError(f"block side {s} does not divide every side of {shape.sides}")
    return BlockGrid(shape, s)


def slice_family(F: Family, axis: int, t: int) -> Family:
    """The (n-1)-dimensional slice {x : x with t inserted at `axis` is in F}."""
    if not 1 <= axis <= F.shape.n:
        raise RangeError(f"axis {axis} outside 1..{F.shape.n}")
    if not 1 <= t <= F.shape.sides[axis - 1]:
        raise RangeError(f"slice value {t} outside 1..{F.shape.sides[axis - 1]}")
    return Family.from_array(F.shape.drop_axis(axis), F.to_array().take(t - 1, axis=axis - 1))


def project(F: Family) -> Family:
    """Projection onto the first n-1 coordinates."""
    return Family.from_array(F.shape.drop_axis(F.shape.n), F.to_array().any(axis=-1))


# ==================== Natural bijection ====================

class NaturalBijection:
    """Order isomorphism C1 x ... x Cn -> [|C1|] x ... x [|Cn|]."""

    def __init__(self, chains: Sequence[Sequence[Sequence[int]]]):
        ordered = []
        for chain in chains:
            pts = sorted((tuple(x) for x in chain), key=lambda x: (sum(x), x))
            for a, b in zip(pts, pts[1:]):
                _check_dims(a, b)
                if a == b or not precedes(a, b):
                    raise NotAChain(f"{a} and {b} are not strictly comparable")
            if not pts:
                raise NotAChain("empty chain")
            ordered.append(tuple(pts))
        self.chains: Tuple[Tuple[Point, ...], ...] = tuple(ordered)
        self._positions = [{x: i + 1 for i, x in enumerate(c)} for c in self.chains]
        self.image_shape = GridShape(tuple(len(c) for c in self.chains))

    def forward(self, elements: Sequence[Sequence[int]]) -> Point:
        try:
            return tuple(pos[tuple(x)] for pos, x in zip(self._positions, elements))
        except KeyError as exc:
            raise RangeError(f"{exc.args[0]} is not on its chain") from None

    def inverse(self, point: Sequence[int]) -> Tuple[Point, ...]:
        if not self.image_shape.contains(point):
            raise RangeError(f"{tuple(point)} outside {self.image_shape.sides}")
        return tuple(c[i - 1] for c, i in zip(self.chains, point))

    def embed(self, point: Sequence[int]) -> Point:
        """Concatenated coordinates of inverse(point) in the ambient product grid."""
        return tuple(x for part in self.inverse(point) for x in part)

    def verify(self) -> bool:
        """Round trip plus order preservation and reflection over the whole product."""
        image = list(self.image_shape.points())
        for a in image:
            if self.forward(self.inverse(a)) != a:
                return False
        for a in image:
            pa = self.inverse(a)
            for b in image:
                pb = self.inverse(b)
                if precedes(a, b) != all(precedes(x, y) for x, y in zip(pa, pb)):
                    return False
        return True


def natural_bijection(chains: Sequence[Sequence[Sequence[int]]]) -> NaturalBijection:
    return NaturalBijection(chains)


# ==================== Scale ladders ====================

@dataclass(frozen=True)
class ScaleLadder:
    """Coordinate scales s_0 = 1 < s_1 < ... for the relations a ==_i b and a ->_i b.

    Either geometric (s_i = base**i) or an explicit schedule.
    """
    base: Optional[int] = None
    schedule: Optional[Tuple[int, ...]] = None

    @classmethod
    def geometric(cls, s: int) -> "ScaleLadder":
        if s < 2:
            raise PrecondError(f"scale base must be at least 2, got {s}")
        return cls(base=s)

    @classmethod
    def explicit(cls, widths: Sequence[int]) -> "ScaleLadder":
        widths = tuple(int(w) for w in widths)
        if not widths or widths[0] != 1 or any(a >= b for a, b in zip(widths, widths[1:])):
            raise PrecondError(f"schedule must start at 1 and increase, got {widths}")
        return cls(schedule=widths)

    def width(self, i: int) -> int:
        if self.schedule is not None:
            return self.schedule[i]
        return self.base ** i

    def equiv(self, a: int, b: int, i: int) -> bool:
        w = self.width(i)
        return (a - 1) // w == (b - 1) // w

    def arrow(self, a: int, b: int, i: int) -> bool:
        return i >= 1 and a < b and self.equiv(a, b, i) and not self.equiv(a, b, i - 1)

    def classify(self, a: int, b: int, i: int) -> Relation:
        if self.arrow(a, b, i):
            return Relation.ARROW
        if self.equiv(a, b, i):
            return Relation.EQUIV
        return Relation.NEITHER


def equiv_rel(x: Sequence[int], y: Sequence[int], i: int, s: int) -> Relation:
    """Classify the final coordinates of two points of one column under ==_i / ->_i.

    ARROW means x ->_i y; a pair with y ->_i x reports EQUIV.
    """
    _check_dims(x, y)
    if tuple(x[:-1]) != tuple(y[:-1]):
        raise PrecondError(f"{tuple(x)} and {tuple(y)} are not in the same column")
    return ScaleLadder.geometric(s).classify(x[-1], y[-1], i)
