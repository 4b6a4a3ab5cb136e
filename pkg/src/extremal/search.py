"""
Exact extremal numbers on small grids by branch and bound.

Points are decided in a linear extension order, include first. Including a
point is allowed only if the family stays free of the forbidden structure;
since the family was free before, only structures using the new point need
to be looked for. The upper bound sums, over a fixed chain partition, the
undecided-or-chosen points of each chain capped at the most a free family
can hold on one chain.

The first split_depth decisions are expanded into independent subtasks that
all start from the same greedy incumbent. Each runs on its own share of the
node budget, so optimum, witness and node counts do not depend on threads.
"""
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from src.core.config import CONF
from src.core.errors import InvariantViolation
from src.core.workers import run_ordered
from src.decomposition.chains import symmetric_chain_decomposition
from src.detectors.boolean_algebra import find_boolean_algebra
from src.detectors.copy_finder import CopyMode, find_copy
from src.detectors.join_detector import find_join_triple
from src.grids.grid_core import Family, GridShape
from src.posets.poset_core import Poset, height
from src.utils.logger import get_logger

logger = get_logger(__name__)

# violates(chosen_bits, new_rank) -> True if adding the point creates the structure
Violation = Callable[[int, int], bool]


@dataclass(frozen=True)
class ExtremalResult:
    shape: GridShape
    structure: str
    mode: Optional[str]
    optimum: int
    witness: Family
    complete: bool
    nodes: int
    root_bound: int

    @property
    def status(self) -> str:
        return "exact" if self.complete else "lower_bound"


@dataclass(frozen=True)
class _Outcome:
    best: int
    bits: Optional[int]
    nodes: int
    complete: bool


class _BranchAndBound:
    def __init__(self, shape: GridShape, violates: Violation, chains: List[int],
                 cap: Optional[int], use_bound: bool = True):
        self.shape = shape
        self.violates = violates
        self.chains = chains
        self.cap = cap
        self.use_bound = use_bound
        self.order = sorted(range(shape.size), key=lambda i: (sum(shape.unrank(i)), i))
        self.suffix = [0] * (shape.size + 1)
        for pos in range(shape.size - 1, -1, -1):
            self.suffix[pos] = self.suffix[pos + 1] | 1 << self.order[pos]

    def bound(self, chosen: int, pos: int) -> int:
        alive = chosen | self.suffix[pos]
        if self.cap is None:
            return alive.bit_count()
        return sum(min((alive & chain).bit_count(), self.cap) for chain in self.chains)

    def greedy(self) -> int:
        chosen = 0
        for x in self.order:
            if not self.violates(chosen, x):
                chosen |= 1 << x
        return chosen

    def prefixes(self, depth: int) -> List[Tuple[int, int]]:
        """Feasible decision prefixes of the first depth points, include first."""
        out = []

        def walk(pos: int, chosen: int):
            if pos == depth:
                out.append((pos, chosen))
                return
            x = self.order[pos]
            if not self.violates(chosen, x):
                walk(pos + 1, chosen | 1 << x)
            walk(pos + 1, chosen)

        walk(0, 0)
        return out

    def run(self, start: Tuple[int, int], incumbent: int, budget: int) -> _Outcome:
        best, best_bits = incumbent, None
        nodes = 0
        exhausted = False
        size = self.shape.size

        def dfs(pos: int, chosen: int, count: int):
            nonlocal best, best_bits, nodes, exhausted
            nodes += 1
            if nodes > budget:
                exhausted = True
                return
            if count > best:
                best, best_bits = count, chosen
            if pos == size:
                return
            if self.use_bound and self.bound(chosen, pos) <= best:
                return
            x = self.order[pos]
            if not self.violates(chosen, x):
                dfs(pos + 1, chosen | 1 << x, count + 1)
                if exhausted:
                    return
            dfs(pos + 1, chosen, count)

        pos, chosen = start
        dfs(pos, chosen, chosen.bit_count())
        return _Outcome(best, best_bits, nodes, not exhausted)


def _search(shape: GridShape, structure: str, mode: Optional[str], violates: Violation,
            chains: List[int], cap: Optional[int], budget: Optional[int], threads: Optional[int],
            use_bound: bool = True) -> ExtremalResult:
    budget = CONF.budget if budget is None else budget
    started = time.monotonic()
    engine = _BranchAndBound(shape, violates, chains, cap, use_bound)
    greedy = engine.greedy()
    depth = min(CONF.split_depth, shape.size)
    subtasks = engine.prefixes(depth)
    share = max(1, budget // max(1, len(subtasks)))
    outcomes = run_ordered(lambda start: engine.run(start, greedy.bit_count(), share), subtasks, threads)

    best, bits = greedy.bit_count(), greedy
    for outcome in outcomes:
        if outcome.bits is not None and outcome.best > best:
            best, bits = outcome.best, outcome.bits
    result = ExtremalResult(
        shape=shape,
        structure=structure,
        mode=mode,
        optimum=best,
        witness=Family(shape, bits),
        complete=all(o.complete for o in outcomes),
        nodes=sum(o.nodes for o in outcomes),
        root_bound=engine.bound(0, 0),
    )
    logger.info("%s on %s: optimum %d (%s, %d nodes, %.2fs)", structure, shape.sides, best,
                result.status, result.nodes, time.monotonic() - started)
    return result


# ==================== Chain partitions for the bound ====================

def _masks(shape: GridShape, groups) -> List[int]:
    out = []
    for group in groups:
        mask = 0
        for x in group:
            mask |= 1 << shape.rank(x)
        out.append(mask)
    return out


def _diagonals(shape: GridShape) -> List[int]:
    lines = {}
    for x in shape.points():
        lines.setdefault(tuple(c - x[0] for c in x[1:]), []).append(x)
    return _masks(shape, lines.values())


def _copy_cap(P: Poset, mode: CopyMode) -> Optional[int]:
    if P.is_chain():
        return P.size - 1
    if mode is CopyMode.WEAK:
        return P.size - 1
    return None


# ==================== Forbidden posets ====================

def _copy_violation(shape: GridShape, P: Poset, mode: CopyMode) -> Violation:
    def violates(chosen: int, x: int) -> bool:
        F = Family(shape, chosen | 1 << x)
        if len(F) < P.size:
            return False
        return find_copy(F, P, mode, must_use=shape.unrank(x)) is not None
    return violates


def max_avoiding(shape: GridShape, P: Poset, mode: CopyMode, budget: Optional[int] = None,
                 threads: Optional[int] = None, use_bound: bool = True) -> ExtremalResult:
    mode = CopyMode(mode)
    shape.check_cap(CONF.max_grid_points)
    if shape.size > CONF.exact_search_max_points:
        logger.warning("grid %s exceeds %d points, the result may be a lower bound",
                       shape.sides, CONF.exact_search_max_points)
    chains = _diagonals(shape) if mode is CopyMode.STRONG else _masks(
        shape, symmetric_chain_decomposition(shape).chains)
    structure = f"{mode.value} copy of a {P.size}-element poset of height {height(P)}"
    result = _search(shape, structure, mode.value, _copy_violation(shape, P, mode), chains,
                     _copy_cap(P, mode), budget, threads, use_bound)
    if find_copy(result.witness, P, mode) is not None:
        raise InvariantViolation(f"witness of size {result.optimum} contains a {mode.value} copy")
    return result


def max_avoiding_exhaustive(shape: GridShape, P: Poset, mode: CopyMode,
                            budget: Optional[int] = None) -> ExtremalResult:
    """Enumerate every free family without bound pruning."""
    return max_avoiding(shape, P, mode, budget=budget, threads=1, use_bound=False)


# ==================== Boolean algebras and joins ====================

def _boolean_violation(shape: GridShape, d: int) -> Violation:
    def violates(chosen: int, x: int) -> bool:
        F = Family(shape, chosen | 1 << x)
        return len(F) >= 1 << d and find_boolean_algebra(F, d) is not None
    return violates


def max_no_boolean_algebra(shape: GridShape, d: int, budget: Optional[int] = None,
                           threads: Optional[int] = None, use_bound: bool = True) -> ExtremalResult:
    chains = _masks(shape, symmetric_chain_decomposition(shape).chains)
    # two comparable points already form a 1-dimensional algebra
    cap = 1 if d == 1 else None
    result = _search(shape, f"{d}-dimensional Boolean algebra", None, _boolean_violation(shape, d),
                     chains, cap, budget, threads, use_bound)
    if find_boolean_algebra(result.witness, d) is not None:
        raise InvariantViolation(f"witness of size {result.optimum} contains a Boolean algebra")
    return result


def max_no_boolean_algebra_exhaustive(shape: GridShape, d: int, budget: Optional[int] = None) -> ExtremalResult:
    return max_no_boolean_algebra(shape, d, budget=budget, threads=1, use_bound=False)


def _join_violation(shape: GridShape) -> Violation:
    def violates(chosen: int, x: int) -> bool:
        F = Family(shape, chosen | 1 << x)
        return len(F) >= 3 and find_join_triple(F) is not None
    return violates


def max_no_join(shape: GridShape, budget: Optional[int] = None, threads: Optional[int] = None,
                use_bound: bool = True) -> ExtremalResult:
    result = _search(shape, "join triple", None, _join_violation(shape), [], None,
                     budget, threads, use_bound)
    if find_join_triple(result.witness) is not None:
        raise InvariantViolation(f"witness of size {result.optimum} contains a join triple")
    return result


def max_no_join_exhaustive(shape: GridShape, budget: Optional[int] = None) -> ExtremalResult:
    return max_no_join(shape, budget=budget, threads=1, use_bound=False)
