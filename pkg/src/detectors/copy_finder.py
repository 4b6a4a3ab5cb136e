"""
Exact detection of weak, induced and strong copies of a poset in a family.

The search places poset elements one at a time, always choosing among the
elements whose predecessors are placed the one with the fewest candidate
points. Candidates are bitsets over the family's members, intersected with
the comparability masks of the images already placed.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import CONF
from src.core.errors import BudgetExceeded, InputError
from src.core.workers import run_ordered
from src.grids.grid_core import Family, Point, precedes, strictly_below
from src.posets.poset_core import Poset, level_decomposition
from src.utils.logger import get_logger

logger = get_logger(__name__)


class CopyMode(str, Enum):
    WEAK = "weak"
    INDUCED = "induced"
    STRONG = "strong"


@dataclass(frozen=True)
class Embedding:
    mode: CopyMode
    mapping: Tuple[Tuple[str, Point], ...]

    @classmethod
    def from_dict(cls, mode: CopyMode, mapping: Dict[str, Sequence[int]]) -> "Embedding":
        return cls(CopyMode(mode), tuple((label, tuple(point)) for label, point in mapping.items()))

    def as_dict(self) -> Dict[str, Point]:
        return dict(self.mapping)

    def image(self) -> List[Point]:
        return [point for _, point in self.mapping]


# ==================== Family index ====================

def _row_masks(matrix: np.ndarray) -> Tuple[int, ...]:
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


@dataclass(frozen=True)
class FamilyIndex:
    """Members of a family with pairwise order relations as member bitmasks."""
    points: Tuple[Point, ...]
    position: Dict[Point, int]
    up: Tuple[int, ...]
    down: Tuple[int, ...]
    strict_up: Tuple[int, ...]
    strict_down: Tuple[int, ...]

    @property
    def all_mask(self) -> int:
        return (1 << len(self.points)) - 1


@lru_cache(maxsize=128)
def family_index(F: Family) -> FamilyIndex:
    coords = F.coords()
    m = len(coords)
    le = np.ones((m, m), dtype=bool)
    lt_all = np.ones((m, m), dtype=bool)
    for axis in range(F.shape.n):
        col = coords[:, axis]
        le &= col[:, None] <= col[None, :]
        lt_all &= col[:, None] < col[None, :]
    np.fill_diagonal(le, False)
    points = tuple(tuple(int(v) for v in row) for row in coords)
    return FamilyIndex(
        points=points,
        position={x: i for i, x in enumerate(points)},
        up=_row_masks(le),
        down=_row_masks(le.T.copy()),
        strict_up=_row_masks(lt_all),
        strict_down=_row_masks(lt_all.T.copy()),
    )


# ==================== Search ====================

class _CopySearch:
    def __init__(self, index: FamilyIndex, P: Poset, mode: CopyMode, budget: int):
        self.index = index
        self.P = P
        self.mode = CopyMode(mode)
        self.budget = budget
        self.nodes = 0
        self.rank = level_decomposition(P).rank
        self.image: List[int] = [-1] * P.size
        self.used = 0
        if self.mode is CopyMode.STRONG:
            self.above, self.below = index.strict_up, index.strict_down
        else:
            self.above, self.below = index.up, index.down

    def candidates(self, z: int) -> int:
        idx = self.index
        cand = idx.all_mask & ~self.used
        for y, j in enumerate(self.image):
            if j < 0:
                continue
            if self.P.lt[y, z]:
                cand &= self.above[j]
            elif self.P.lt[z, y]:
                cand &= self.below[j]
            elif self.mode is not CopyMode.WEAK:
                cand &= ~(idx.up[j] | idx.down[j])
            if not cand:
                break
        return cand

    def _next_variable(self) -> Tuple[int, int]:
        best = None
        for z in range(self.P.size):
            if self.image[z] >= 0:
                continue
            if any(self.image[y] < 0 for y in np.flatnonzero(self.P.lt[:, z])):
                continue
            cand = self.candidates(z)
            key = (cand.bit_count(), self.rank[z], z)
            if best is None or key < best[0]:
                best = (key, z, cand)
                if key[0] == 0:
                    break
        return best[1], best[2]

    def assign(self, z: int, j: int):
        self.image[z] = j
        self.used |= 1 << j

    def unassign(self, z: int):
        self.used &= ~(1 << self.image[z])
        self.image[z] = -1

    def solve(self, placed: int) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.nodes)
        if placed == self.P.size:
            return True
        z, cand = self._next_variable()
        while cand:
            low = cand & -cand
            cand ^= low
            self.assign(z, low.bit_length() - 1)
            if self.solve(placed + 1):
                return True
            self.unassign(z)
        return False

    def embedding(self) -> Embedding:
        return Embedding(
            self.mode,
            tuple((self.P.labels[z], self.index.points[j]) for z, j in enumerate(self.image)),
        )


def _search_with(index: FamilyIndex, P: Poset, mode: CopyMode, budget: int,
                 pinned: Optional[Tuple[int, int]] = None) -> Tuple[Optional[Embedding], int]:
    """The embedding found (or None) and the number of nodes visited."""
    search = _CopySearch(index, P, mode, budget)
    placed = 0
    if pinned is not None:
        z, j = pinned
        search.assign(z, j)
        placed = 1
    found = search.solve(placed)
    return (search.embedding() if found else None), search.nodes


def find_copy(F: Family, P: Poset, mode: CopyMode, budget: Optional[int] = None,
              must_use: Optional[Point] = None, threads: int = 1) -> Optional[Embedding]:
    """An embedding of P into F in the given mode, or None when none exists.

    With must_use, only embeddings whose image contains that point are sought.
    threads > 1 splits the first branching level. Branch outcomes are replayed
    in order against one shared node budget, so the witness and any
    BudgetExceeded are those of the sequential run.
    """
    mode = CopyMode(mode)
    budget = CONF.budget if budget is None else budget
    index = family_index(F)
    if P.size == 0:
        return Embedding(mode, ())
    if P.size > len(index.points):
        return None

    if must_use is not None:
        point = tuple(must_use)
        if point not in index.position:
            raise InputError(f"pinned point {point} is not in the family")
        j = index.position[point]
        rank = level_decomposition(P).rank
        for z in sorted(range(P.size), key=lambda v: (rank[v], v)):
            found, _ = _search_with(index, P, mode, budget, pinned=(z, j))
            if found is not None:
                return found
        return None

    if threads <= 1:
        return _search_with(index, P, mode, budget)[0]

    root = _CopySearch(index, P, mode, budget)
    z, cand = root._next_variable()
    branches = [(z, j) for j in range(len(index.points)) if cand >> j & 1]

    def run_branch(pin):
        try:
            return _search_with(index, P, mode, budget, pinned=pin)
        except BudgetExceeded:
            return None, budget + 1

    # replay the branches in sequential order against one shared budget
    spent = 1
    if spent > budget:
        raise BudgetExceeded(spent)
    for found, nodes in run_ordered(run_branch, branches, threads):
        spent += nodes
        if spent > budget:
            raise BudgetExceeded(budget + 1)
        if found is not None:
            return found
    return None


# ==================== Verification and oracle ====================

def _pair_ok(P: Poset, mode: CopyMode, x: int, y: int, a: Point, b: Point) -> bool:
    a_le_b = precedes(a, b) and a != b
    b_le_a = precedes(b, a) and a != b
    if P.lt[x, y]:
        return strictly_below(a, b) if mode is CopyMode.STRONG else a_le_b
    if P.lt[y, x]:
        return strictly_below(b, a) if mode is CopyMode.STRONG else b_le_a
    return mode is CopyMode.WEAK or not (a_le_b or b_le_a)


def verify_embedding(F: Family, P: Poset, e: Embedding) -> bool:
    mapping = e.as_dict()
    if set(mapping) != set(P.labels) or len(e.mapping) != P.size:
        return False
    images = [mapping[label] for label in P.labels]
    if len(set(images)) != len(images) or any(point not in F for point in images):
        return False
    mode = CopyMode(e.mode)
    for x in range(P.size):
        for y in range(x + 1, P.size):
            if not _pair_ok(P, mode, x, y, images[x], images[y]):
                return False
    return True


def find_copy_exhaustive(F: Family, P: Poset, mode: CopyMode) -> Optional[Embedding]:
    """Try every injection of P into F; small instances only."""
    mode = CopyMode(mode)
    points = list(F)
    for images in permutations(points, P.size):
        e = Embedding(mode, tuple(zip(P.labels, images)))
        if verify_embedding(F, P, e):
            return e
    return None
