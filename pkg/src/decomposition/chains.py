"""
Chain partitions of grids.

symmetric_chain_decomposition builds an SCD factor by factor: a symmetric
chain of the first factors times the next side is a rectangle, which splits
into symmetric hook-shaped chains. partition_long_chains then rebalances the
SCD until every chain meets the long-chain contract.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.config import CONF
from src.core.errors import ContractUnmet, InvariantViolation, PrecondError
from src.decomposition.width import grid_width
from src.grids.grid_core import GridShape, Point, precedes
from src.utils.logger import get_logger

logger = get_logger(__name__)

Chain = Tuple[Point, ...]


@dataclass(frozen=True)
class ChainPartition:
    shape: GridShape
    chains: Tuple[Chain, ...]

    def __post_init__(self):
        seen = set()
        for chain in self.chains:
            for a, b in zip(chain, chain[1:]):
                if a == b or not precedes(a, b):
                    raise InvariantViolation(f"{a} and {b} break the chain order")
            for x in chain:
                if x in seen or not self.shape.contains(x):
                    raise InvariantViolation(f"point {x} repeated or outside the grid")
                seen.add(x)
        if len(seen) != self.shape.size:
            raise InvariantViolation(f"chains cover {len(seen)} of {self.shape.size} points")

    @property
    def count(self) -> int:
        return len(self.chains)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.chains)

    @property
    def min_size(self) -> int:
        return min(self.sizes, default=0)


def _sorted_chain(points) -> Chain:
    return tuple(sorted(points, key=lambda x: (sum(x), x)))


def long_chain_target(shape: GridShape, w: Optional[int] = None) -> int:
    """max(1, ceil(k^n/(2w) - 1/2)) = max(1, ceil((N - w) / 2w))."""
    w = grid_width(shape) if w is None else w
    total = shape.size
    return max(1, -(-(total - w) // (2 * w)))


# ==================== Symmetric chain decomposition ====================

def _hooks(a: int, b: int) -> List[List[Tuple[int, int]]]:
    """Symmetric chains of the rectangle {0..a-1} x {0..b-1}, as (u, v) pairs."""
    if a > b:
        return [[(u, v) for v, u in chain] for chain in _hooks(b, a)]
    chains = []
    for i in range(a):
        top = b - 1 - i
        chain = [(i, v) for v in range(top + 1)] + [(u, top) for u in range(i + 1, a)]
        chains.append(chain)
    return chains


def symmetric_chain_decomposition(shape: GridShape) -> ChainPartition:
    chains: List[List[Point]] = [[()]]
    for k in shape.sides:
        grown = []
        for chain in chains:
            for hook in _hooks(len(chain), k):
                grown.append([chain[u] + (v + 1,) for u, v in hook])
        chains = grown
    ordered = sorted((tuple(c) for c in chains), key=lambda c: (-len(c), c[0]))
    return ChainPartition(shape, ordered)


# ==================== Long-chain rebalancing ====================

def _fits(x: Point, chain: Sequence[Point]) -> bool:
    return all(precedes(x, y) or precedes(y, x) for y in chain)


def _splice(chains: List[List[Point]], target: int) -> bool:
    """Greedy max-min moves: a short chain takes any fitting point of a chain above target."""
    moved = True
    while moved:
        short = [i for i, c in enumerate(chains) if len(c) < target]
        if not short:
            return True
        moved = False
        for i in sorted(short, key=lambda j: (len(chains[j]), j)):
            donors = sorted((j for j, c in enumerate(chains) if len(c) > target), key=lambda j: (-len(chains[j]), j))
            for j in donors:
                x = next((x for x in chains[j] if _fits(x, chains[i])), None)
                if x is not None:
                    chains[j].remove(x)
                    chains[i].append(x)
                    moved = True
                    break
    return all(len(c) >= target for c in chains)


def _augment(chains: List[List[Point]], target: int) -> bool:
    """Move points along a path of chains ending at a chain with spare points."""
    while True:
        short = next((i for i, c in enumerate(chains) if len(c) < target), None)
        if short is None:
            return True
        # BFS over (chain, point it gives away); parent links rebuild the path
        frontier = [(short, None)]
        parent: Dict[Tuple[int, Optional[Point]], Tuple] = {(short, None): None}
        found = None
        while frontier and found is None:
            nxt = []
            for state in frontier:
                i, given = state
                needy = [y for y in chains[i] if y != given]
                for j, chain in enumerate(chains):
                    if j == i or any(s[0] == j for s in parent):
                        continue
                    for x in chain:
                        if not _fits(x, needy):
                            continue
                        child = (j, x)
                        parent[child] = state
                        if len(chain) > target:
                            found = child
                        else:
                            nxt.append(child)
                        break
                    if found:
                        break
                if found:
                    break
            frontier = nxt
        if found is None:
            return False
        state = found
        while parent[state] is not None:
            j, x = state
            i, _ = parent[state]
            chains[j].remove(x)
            chains[i].append(x)
            state = parent[state]


def _exhaustive_partition(shape: GridShape, w: int, target: int) -> Optional[List[List[Point]]]:
    """Assign points in a linear extension to w chains; small grids only."""
    order = sorted(shape.points(), key=lambda x: (sum(x), x))
    chains: List[List[Point]] = []

    def place(pos: int) -> bool:
        if pos == len(order):
            return len(chains) == w and all(len(c) >= target for c in chains)
        remaining = len(order) - pos
        deficit = sum(max(0, target - len(c)) for c in chains) + (w - len(chains)) * target
        if deficit > remaining:
            return False
        x = order[pos]
        for c in chains:
            if precedes(c[-1], x):
                c.append(x)
                if place(pos + 1):
                    return True
                c.pop()
        if len(chains) < w:
            chains.append([x])
            if place(pos + 1):
                return True
            chains.pop()
        return False

    return chains if place(0) else None


def partition_long_chains(shape: GridShape) -> ChainPartition:
    """w chains, each of size at least max(1, ceil(k^n/(2w) - 1/2)); verified."""
    if not shape.is_uniform:
        raise PrecondError("long-chain partition is defined for uniform [k]^n")
    w = grid_width(shape)
    target = long_chain_target(shape, w)
    chains = [list(c) for c in symmetric_chain_decomposition(shape).chains]
    ok = _splice(chains, target) or _augment(chains, target)
    if not ok:
        logger.warning("splice moves stalled on %s, falling back to exhaustive search", shape.sides)
        if shape.size <= CONF.exact_partition_max_points:
            found = _exhaustive_partition(shape, w, target)
            if found is not None:
                chains, ok = found, True
    if not ok:
        raise ContractUnmet(f"no partition of {shape.sides} into {w} chains of size >= {target} found")
    result = ChainPartition(shape, tuple(_sorted_chain(c) for c in chains))
    if result.count != w or result.min_size < target:
        raise ContractUnmet(f"partition of {shape.sides}: {result.count} chains, min size {result.min_size}")
    logger.debug("long chains %s: w=%d target=%d min=%d", shape.sides, w, target, result.min_size)
    return result