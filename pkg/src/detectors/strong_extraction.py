"""
Constructive extraction of strong copies from large families.

Each routine turns a counting argument into a procedure that returns a
witness: peeling line maxima for strong chains, 2 x ... x 2 block shadows
for strong complete multilevel posets, good elements and witness lifts for
the interpolation sequence, and common projections of aligned fat blocks.
Every returned embedding is re-verified before it leaves the module.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import ExtractionFailed, InvariantViolation, PrecondError, RangeError, ThresholdNotMet
from src.decomposition.grids import densest_subgrid_array
from src.detectors.copy_finder import CopyMode, Embedding, find_copy, verify_embedding
from src.extremal.bounds import (
    dense_extraction_threshold, strong_chain_bound, strong_multilevel_applies, strong_multilevel_bound,
)
from src.extremal.constants import base_dimension
from src.grids.grid_core import BlockGrid, Family, GridShape, Point, ScaleLadder, block_decompose, slice_family
from src.grids.scales import witness_table
from src.posets.poset_core import InterpolationSequence, Poset, chain_poset, complete_multilevel, interpolation_sequence
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _checked(F: Family, P: Poset, e: Embedding, what: str) -> Embedding:
    if not verify_embedding(F, P, e):
        raise ExtractionFailed(f"{what} produced an embedding that is not a strong copy")
    return e


# ==================== Power-side subgrids ====================

@dataclass(frozen=True)
class PowerSubgrid:
    """F restricted to the densest m x ... x m subgrid, re-indexed onto [m]^n."""
    family: Family
    selection: Tuple[Tuple[int, ...], ...]

    def lift(self, e: Embedding) -> Embedding:
        return Embedding(e.mode, tuple(
            (label, tuple(self.selection[axis][c - 1] + 1 for axis, c in enumerate(point)))
            for label, point in e.mapping
        ))


def power_subgrid(F: Family, m: int) -> PowerSubgrid:
    if all(k == m for k in F.shape.sides):
        identity = tuple(tuple(range(m)) for _ in F.shape.sides)
        return PowerSubgrid(F, identity)
    arr = F.to_array()
    dense = densest_subgrid_array(arr, m)
    sub = arr[np.ix_(*dense.selection)]
    return PowerSubgrid(Family.from_array(GridShape((m,) * F.shape.n), sub), dense.selection)


def _integer_root(k: int, h: int) -> int:
    s = max(1, int(round(k ** (1 / h))))
    while s ** h > k:
        s -= 1
    while (s + 1) ** h <= k:
        s += 1
    return s


# ==================== Strong chains by peeling ====================

def _has_successor(arr: np.ndarray, axis: int) -> np.ndarray:
    """Members with another member later on their line along axis."""
    a = np.moveaxis(arr, axis, -1)
    suffix = np.logical_or.accumulate(a[..., ::-1], axis=-1)[..., ::-1]
    later = np.zeros_like(a)
    later[..., :-1] = suffix[..., 1:]
    return np.moveaxis(later & a, -1, axis)


def _peel_chain(arr: np.ndarray, h: int) -> Optional[List[Tuple[int, ...]]]:
    """Strong chain of h points (0-based, increasing) in a boolean array, or None."""
    if h == 1:
        members = np.argwhere(arr)
        return [tuple(int(c) for c in members[0])] if len(members) else None
    layers = [arr]
    for axis in range(arr.ndim - 1, -1, -1):
        layers.append(_has_successor(layers[-1], axis))
    # layers[j] is F_{d-j}; F_0 is the last
    chain = _peel_chain(layers[-1], h - 1)
    if chain is None:
        return None
    x = list(chain[-1])
    for axis in range(arr.ndim):
        level = layers[arr.ndim - axis - 1]
        t = x[axis] + 1
        while not level[tuple(x[:axis] + [t] + x[axis + 1:])]:
            t += 1
        x[axis] = t
    return chain + [tuple(x)]


def extract_strong_chain(F: Family, h: int) -> Optional[Embedding]:
    """A strong copy of the h-chain, found by removing line maxima axis by axis h-1 times.

    On uniform grids a result is guaranteed once |F| > d(h-1)k^(d-1).
    """
    if h < 1:
        raise PrecondError(f"chain size must be >= 1, got {h}")
    P = chain_poset(h)
    points = _peel_chain(F.to_array(), h)
    if points is None:
        if F.shape.is_uniform and len(F) > strong_chain_bound(F.shape.side, F.shape.n, h):
            raise ExtractionFailed(f"peeling found no strong {h}-chain in a family of size {len(F)}")
        return None
    e = Embedding(CopyMode.STRONG, tuple(
        (label, tuple(c + 1 for c in point)) for label, point in zip(P.labels, points)
    ))
    return _checked(F, P, e, "strong chain peeling")


# ==================== Block shadows ====================

def block_counts(F: Family, blocks: BlockGrid) -> np.ndarray:
    s = blocks.side
    arr = F.to_array()
    split = []
    for k in F.shape.sides:
        split.extend((k // s, s))
    return arr.reshape(split).sum(axis=tuple(range(1, 2 * F.shape.n, 2)))


def block_shadow(F: Family, blocks: BlockGrid, min_count: int = 1) -> Family:
    """Block indices whose blocks hold at least min_count members of F."""
    return Family.from_array(blocks.index_shape, block_counts(F, blocks) >= min_count)


def lift_from_blocks(e: Embedding, F: Family, blocks: BlockGrid) -> Embedding:
    """Replace every block index by the first member of F in that block.

    Any choice of representatives keeps a strong copy strong.
    """
    mapping = []
    for label, u in e.mapping:
        members = blocks.members(F, u)
        if not len(members):
            raise ExtractionFailed(f"block {u} holds no member to lift {label}")
        mapping.append((label, next(iter(members))))
    return Embedding(e.mode, tuple(mapping))


def _largest_rank_class(members: Sequence[Point], blocks: BlockGrid) -> List[Point]:
    by_sum: Dict[int, List[Point]] = {}
    for x in members:
        by_sum.setdefault(sum(blocks.local(x)), []).append(x)
    return max(by_sum.values(), key=len)


def _multilevel_power(F: Family, h: int, r: int) -> Optional[Embedding]:
    P = complete_multilevel([r] * h)
    k, d = F.shape.side, F.shape.n
    if k == 1:
        if P.size == 1 and len(F):
            return Embedding(CopyMode.STRONG, ((P.labels[0], next(iter(F))),))
        return None
    blocks = block_decompose(F.shape, 2)
    heavy = block_shadow(F, blocks, r * (d + 1))
    chain = extract_strong_chain(heavy, h)
    if chain is not None:
        mapping = []
        for level, u in enumerate(chain.image(), start=1):
            # equal local rank sums form an antichain inside a 2 x ... x 2 block
            antichain = _largest_rank_class(blocks.members(F, u).points(), blocks)
            if len(antichain) < r:
                raise ExtractionFailed(f"block {u} holds no antichain of size {r}")
            mapping.extend((f"L{level}_{j + 1}", x) for j, x in enumerate(antichain[:r]))
        return Embedding(CopyMode.STRONG, tuple(mapping))
    inner = _multilevel_power(block_shadow(F, blocks, 1), h, r)
    return None if inner is None else lift_from_blocks(inner, F, blocks)


def extract_strong_multilevel(F: Family, h: int, r: int) -> Optional[Embedding]:
    """A strong copy of K^h_r via 2 x ... x 2 block shadows.

    Either some h heavy blocks form a strong chain, each contributing an
    antichain of size r, or the occupied blocks are searched one scale up.
    Sides that are not powers of 2 are first cut to the densest 2^e subgrid.
    """
    if h < 1 or r < 1:
        raise PrecondError(f"need h >= 1 and r >= 1, got h={h}, r={r}")
    if not F.shape.is_uniform:
        raise PrecondError("multilevel extraction runs on uniform grids")
    k, d = F.shape.side, F.shape.n
    sub = power_subgrid(F, 1 << (k.bit_length() - 1))
    found = _multilevel_power(sub.family, h, r)
    P = complete_multilevel([r] * h)
    if found is None:
        if h >= 2 and strong_multilevel_applies(d, r) and len(F) > strong_multilevel_bound(k, d, h):
            raise ExtractionFailed(f"no strong K^{h}_{r} extracted from a family of size {len(F)}")
        return None
    return _checked(F, P, sub.lift(found), "multilevel extraction")


# ==================== Dense extraction along the interpolation sequence ====================

def _lift_level(F: Family, seq: InterpolationSequence, l: int, h: int, s: int,
                budget: Optional[int]) -> Optional[Embedding]:
    """Strong copy of P_l in F over [s^h]^(d0+l)."""
    P_l = seq.step(l)
    if l == 0:
        return find_copy(F, P_l, CopyMode.STRONG, budget=budget)
    k, d = F.shape.side, F.shape.n
    table = witness_table(F, ScaleLadder.geometric(s), h)
    good = table.good()
    lost = len(F) - len(good)
    if lost > 2 * h * k ** (d - 1) * s ** (h - 1):
        raise InvariantViolation(f"{lost} members lack witnesses, more than 2hk^(d-1)s^(h-1)")

    counts = good.to_array().reshape(-1, k).sum(axis=0)
    t = int(np.argmax(counts)) + 1
    inner = _lift_level(slice_family(good, d, t), seq, l - 1, h, s, budget)
    if inner is None:
        return None

    split = seq.splits[l - 1]
    rank = seq.levels.rank
    index = {label: i for i, label in enumerate(seq.source.labels)}
    mapping = []
    for label, u in inner.mapping:
        z = index[label]
        x = tuple(u) + (t,)
        scale = rank[z] if z in split else rank[z] - 1 - h
        mapping.append((label, table.witness(x, scale)))
    e = Embedding(CopyMode.STRONG, tuple(mapping))
    return _checked(F, P_l, e, f"lift to step {l}")


def extract_strong_copy_dense(F: Family, P: Poset, l: int, s: Optional[int] = None,
                              enforce_threshold: bool = True,
                              budget: Optional[int] = None) -> Optional[Embedding]:
    """Strong copy of the interpolation step P_l in a dense F over [k]^(d0+l).

    Good members (witnesses above and below at every scale) are kept, the
    last-coordinate slice with the most good members is searched for P_(l-1)
    and every element is lifted to its witness at the scale given by its rank.
    When k is not a perfect h-th power F is cut to its densest s^h subgrid.
    """
    seq = interpolation_sequence(P)
    h = seq.levels.height
    if not 0 <= l <= seq.q:
        raise RangeError(f"step {l} outside 0..{seq.q}")
    if not F.shape.is_uniform:
        raise PrecondError("dense extraction runs on uniform grids")
    k, d = F.shape.side, F.shape.n
    d0 = d - l
    if d0 < 1:
        raise PrecondError(f"dimension {d} too small for step {l}")

    threshold = dense_extraction_threshold(k, d0, h, l, d)
    met = threshold.exceeded_by(len(F)) and d0 >= base_dimension(seq.levels.max_level_size)
    if enforce_threshold and not met:
        raise ThresholdNotMet(
            f"|F| = {len(F)} with d0 = {d0} is not above {threshold.approx():.1f} or d0 is too small"
        )

    if l > 0:
        s = _integer_root(k, h) if s is None else s
        if s < 2:
            return None
        if s ** h > k:
            raise PrecondError(f"s^h = {s ** h} exceeds the side {k}")
        sub = power_subgrid(F, s ** h)
    else:
        sub = power_subgrid(F, k)
    found = _lift_level(sub.family, seq, l, h, s or 1, budget)
    if found is None:
        if met:
            raise ExtractionFailed(f"no strong copy of step {l} extracted above the threshold")
        return None
    logger.debug("dense extraction: step %d of %d in %s", l, seq.q, F.shape.sides)
    return _checked(F, seq.step(l), sub.lift(found), "dense extraction")


# ==================== Fat blocks ====================

def find_copy_via_fat_blocks(blocks: Sequence[Point], F: Family, P: Poset, l: int,
                             blockgrid: BlockGrid, budget: Optional[int] = None) -> Optional[Embedding]:
    """Strong copy of P_l built from h blocks stacked along the last axis.

    A strong copy in the common projection G of the blocks is found first;
    each element is then placed in the block matching its rank, above the
    point of G it maps to.
    """
    seq = interpolation_sequence(P)
    h = seq.levels.height
    if not 0 <= l <= seq.q:
        raise RangeError(f"step {l} outside 0..{seq.q}")
    stack = sorted((tuple(u) for u in blocks), key=lambda u: u[-1])
    if len(stack) != h:
        raise PrecondError(f"need {h} blocks, got {len(stack)}")
    if len({u[:-1] for u in stack}) != 1 or len({u[-1] for u in stack}) != h:
        raise PrecondError("blocks must share their first n-1 indices and differ in the last")

    common = blockgrid.projection(F, stack[0])
    for u in stack[1:]:
        common = common & blockgrid.projection(F, u)
    if not len(common):
        return None

    P_l = seq.step(l)
    inner = None
    if l > 0 and common.shape.n > l and common.shape.side > 1:
        try:
            inner = extract_strong_copy_dense(common, P, l, enforce_threshold=True, budget=budget)
        except ThresholdNotMet:
            inner = None
    if inner is None:
        inner = find_copy(common, P_l, CopyMode.STRONG, budget=budget)
    if inner is None:
        return None

    side = blockgrid.side
    rank = seq.levels.rank
    index = {label: i for i, label in enumerate(seq.source.labels)}
    mapping = []
    for label, g in inner.mapping:
        u = stack[rank[index[label]] - 1]
        column = [x for x in blockgrid.members(F, u) if blockgrid.local(x)[:-1] == tuple(g)]
        if not column:
            raise ExtractionFailed(f"block {u} has no member above {g}")
        mapping.append((label, column[0]))
    e = Embedding(CopyMode.STRONG, tuple(mapping))
    logger.debug("fat blocks %s: lifted a strong copy of step %d (side %d)", stack, l, side)
    return _checked(F, P_l, e, "fat block lift")
