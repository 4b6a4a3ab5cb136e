"""
Block classification and the measured side of the block induction.

Blocks of side s_i are labeled by how many members of F they hold and by
the size of their projection; the census of labels and the counts of
members lacking scale witnesses are compared against the inequalities the
induction relies on. Counts of members without witnesses obey their bounds
for every family and are asserted. The remaining comparisons only hold for
families free of the poset and are reported.
"""
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional

from src.core.errors import InvariantViolation, PrecondError
from src.extremal.constants import BoundConstants
from src.grids.grid_core import BlockGrid, Family, Point, ScaleLadder, block_decompose
from src.grids.scales import missing_witnesses, witness_table
from src.posets.poset_core import Poset, level_decomposition
from src.utils.logger import get_logger

logger = get_logger(__name__)


class BlockLabel(str, Enum):
    EMPTY = "empty"
    LIGHT = "light"
    FAT = "fat"
    MEDIUM = "medium"


def classify_block(count: int, projection: int, side: int, d: int, p: int, s_prev: int) -> BlockLabel:
    if count == 0:
        return BlockLabel.EMPTY
    if count <= Fraction(side ** (d - 1), p):
        return BlockLabel.LIGHT
    if projection >= Fraction(side ** (d - 1), p * p * s_prev):
        return BlockLabel.FAT
    return BlockLabel.MEDIUM


def classify_blocks(F: Family, blocks: BlockGrid, p: int, s_prev: int) -> Dict[Point, BlockLabel]:
    d = F.shape.n
    labels = {}
    for u in blocks.blocks():
        count = len(blocks.members(F, u))
        projection = len(blocks.projection(F, u)) if count else 0
        labels[u] = classify_block(count, projection, blocks.side, d, p, s_prev)
    return labels


@dataclass
class BlockCensus:
    side: int
    labels: Dict[Point, BlockLabel]
    blocks: Counter = field(default_factory=Counter)
    members: Counter = field(default_factory=Counter)

    def count(self, label: BlockLabel) -> int:
        return self.blocks[label]

    def max_fat_in_row(self) -> int:
        """Most fat blocks sharing their first n-1 indices."""
        rows = Counter(u[:-1] for u, lab in self.labels.items() if lab is BlockLabel.FAT)
        return max(rows.values(), default=0)


def block_census(F: Family, blocks: BlockGrid, p: int, s_prev: int) -> BlockCensus:
    labels = classify_blocks(F, blocks, p, s_prev)
    census = BlockCensus(blocks.side, labels)
    for u, label in labels.items():
        census.blocks[label] += 1
        census.members[label] += len(blocks.members(F, u))
    return census


# ==================== Claim checks ====================

@dataclass(frozen=True)
class ClaimCheck:
    name: str
    scale: Optional[int]
    measured: int
    bound: Optional[Fraction]
    conditional: bool

    @property
    def holds(self) -> Optional[bool]:
        return None if self.bound is None else self.measured <= self.bound


def claim_checks(F: Family, P: Poset, l: int, ladder: ScaleLadder,
                 constants: Optional[BoundConstants] = None) -> List[ClaimCheck]:
    """Measured block-induction quantities of F for step l at the scales of ladder."""
    if not F.shape.is_uniform:
        raise PrecondError("claim checks run on uniform grids")
    k, d = F.shape.side, F.shape.n
    h, p = level_decomposition(P).height, P.size
    rows = k ** (d - 1)
    table = witness_table(F, ladder, h)
    checks: List[ClaimCheck] = []

    for i in range(1, h):
        s_i, s_prev = ladder.width(i), ladder.width(i - 1)
        if k % s_i:
            logger.info("scale %d: block side %d does not divide %d, skipped", i, s_i, k)
            continue
        blocks = block_decompose(F.shape, s_i)
        census = block_census(F, blocks, p, s_prev)
        per_axis = Fraction(k, s_i) ** (d - 1)
        if constants is not None:
            checks.append(ClaimCheck("light_blocks", i, census.count(BlockLabel.LIGHT),
                                     constants.C[l] * per_axis, True))
        checks.append(ClaimCheck("fat_blocks", i, census.count(BlockLabel.FAT),
                                 2 * h * p * p * s_prev * per_axis, True))
        checks.append(ClaimCheck("fat_blocks_per_row", i, census.max_fat_in_row(),
                                 Fraction(2 * h * p * p * s_prev), True))

        missing = table.missing(i)
        excess = 0
        for u, label in census.labels.items():
            if label is BlockLabel.MEDIUM:
                bad = len(blocks.members(missing, u))
                excess = max(excess, bad - 2 * s_prev * len(blocks.projection(F, u)))
        checks.append(ClaimCheck("medium_block_bad_excess", i, excess, Fraction(0), False))

    s_top = ladder.width(h)
    per_class = Counter((x[:-1], (x[-1] - 1) // s_top) for x in table.missing(h))
    checks.append(ClaimCheck("top_scale_bad_per_class", h, max(per_class.values(), default=0),
                             Fraction(2 * ladder.width(h - 1)), False))

    for i in range(1, h + 1):
        bad = len(missing_witnesses(F, ladder, i))
        checks.append(ClaimCheck("missing_at_scale", i, bad,
                                 Fraction(2 * ladder.width(i - 1) * rows * -(-k // ladder.width(i))), False))

    good = len(table.good())
    lost_bound = sum(2 * ladder.width(i - 1) * rows * -(-k // ladder.width(i)) for i in range(1, h + 1))
    checks.append(ClaimCheck("good_lower", None, len(F) - good, Fraction(lost_bound), False))
    if constants is not None and l >= 1:
        checks.append(ClaimCheck("good_upper", None, good, constants.C[l - 1] * rows, True))

    for check in checks:
        if not check.conditional and not check.holds:
            raise InvariantViolation(f"{check.name} at scale {check.scale}: {check.measured} exceeds {check.bound}")
    logger.debug("claim checks for step %d: %d comparisons", l, len(checks))
    return checks
