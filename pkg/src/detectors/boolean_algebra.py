"""
d-dimensional Boolean algebras {v0 + sum_{i in I} v_i : I subset [d]} inside a family.
"""
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from src.core.config import CONF
from src.core.errors import BudgetExceeded, PrecondError
from src.grids.grid_core import Family, Point, precedes
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BooleanAlgebraWitness:
    v0: Point
    offsets: Tuple[Point, ...]

    @property
    def d(self) -> int:
        return len(self.offsets)

    def points(self) -> List[Point]:
        """All 2^d sums, subsets enumerated in binary order."""
        out = []
        for mask in range(1 << self.d):
            x = list(self.v0)
            for i, v in enumerate(self.offsets):
                if mask >> i & 1:
                    x = [a + b for a, b in zip(x, v)]
            out.append(tuple(x))
        return out


def _support(v: Sequence[int]) -> int:
    mask = 0
    for i, c in enumerate(v):
        if c:
            mask |= 1 << i
    return mask


def _add(x: Sequence[int], v: Sequence[int]) -> Point:
    return tuple(a + b for a, b in zip(x, v))


def verify_boolean_algebra(F: Family, w: BooleanAlgebraWitness) -> bool:
    seen = 0
    for v in w.offsets:
        if any(c < 0 for c in v) or not any(v):
            return False
        supp = _support(v)
        if supp & seen:
            return False
        seen |= supp
    return all(x in F for x in w.points())


def find_boolean_algebra(F: Family, d: int, budget: Optional[int] = None) -> Optional[BooleanAlgebraWitness]:
    """Depth-first search over base points and pairwise disjoint nonzero offsets.

    Offsets from a base v0 are the differences y - v0 for members y above v0,
    tried in descending lexicographic order. An offset extends the partial
    algebra only if every current sum shifted by it stays in F.
    """
    if d < 1:
        raise PrecondError(f"Boolean algebra dimension must be >= 1, got {d}")
    budget = CONF.budget if budget is None else budget
    members = F.points()
    nodes = 0

    for v0 in members:
        offsets = sorted(
            (tuple(b - a for a, b in zip(v0, y)) for y in members if y != v0 and precedes(v0, y)),
            reverse=True,
        )
        if len(offsets) < d:
            continue
        supports = [_support(v) for v in offsets]
        chosen: List[Point] = []

        def extend(start: int, sums: List[Point], used: int) -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(nodes)
            if len(chosen) == d:
                return True
            for j in range(start, len(offsets) - (d - len(chosen) - 1)):
                if supports[j] & used:
                    continue
                shifted = [_add(x, offsets[j]) for x in sums]
                if not all(x in F for x in shifted):
                    continue
                chosen.append(offsets[j])
                if extend(j + 1, sums + shifted, used | supports[j]):
                    return True
                chosen.pop()
            return False

        if extend(0, [v0], 0):
            logger.debug("boolean algebra d=%d found at %s after %d nodes", d, v0, nodes)
            return BooleanAlgebraWitness(v0, tuple(chosen))
    return None


# ==================== Exhaustive oracle ====================

def _set_partitions(items: Sequence[int], d: int) -> Iterator[List[List[int]]]:
    """Partitions of items into exactly d nonempty unlabeled blocks."""
    if d == 0:
        if not items:
            yield []
        return
    if len(items) < d:
        return
    first, rest = items[0], items[1:]
    # first alone in a block
    for part in _set_partitions(rest, d - 1):
        yield [[first]] + part
    # first joins an existing block
    for part in _set_partitions(rest, d):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def find_boolean_algebra_exhaustive(F: Family, d: int) -> Optional[BooleanAlgebraWitness]:
    """Enumerate base, top and a split of the top's support into d blocks."""
    if d < 1:
        raise PrecondError(f"Boolean algebra dimension must be >= 1, got {d}")
    members = F.points()
    for v0 in members:
        for top in members:
            if top == v0 or not precedes(v0, top):
                continue
            diff = tuple(b - a for a, b in zip(v0, top))
            supp = [i for i, c in enumerate(diff) if c]
            for blocks in _set_partitions(supp, d):
                offsets = tuple(
                    tuple(diff[i] if i in block else 0 for i in range(len(diff))) for block in blocks
                )
                w = BooleanAlgebraWitness(v0, offsets)
                if verify_boolean_algebra(F, w):
                    return w
    return None


def contains_boolean_algebra(F: Family, d: int, budget: Optional[int] = None) -> bool:
    return find_boolean_algebra(F, d, budget) is not None
