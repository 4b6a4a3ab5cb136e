"""
Choosing h sets from a system of large subsets with a large common intersection.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import FrozenSet, Hashable, Sequence, Tuple, Union

from src.core.errors import InvariantViolation, PrecondError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SetSystem:
    ground: FrozenSet[Hashable]
    subsets: Tuple[FrozenSet[Hashable], ...]
    alpha: Fraction

    def __post_init__(self):
        for i, V in enumerate(self.subsets):
            if not V <= self.ground:
                raise PrecondError(f"V_{i + 1} is not a subset of the ground set")
            if len(V) < self.alpha * len(self.ground):
                raise PrecondError(f"|V_{i + 1}| = {len(V)} is below alpha |V|")

    @classmethod
    def build(cls, ground, subsets: Sequence, alpha: Union[Fraction, int, str]) -> "SetSystem":
        return cls(frozenset(ground), tuple(frozenset(V) for V in subsets), Fraction(alpha))

    @property
    def m(self) -> int:
        return len(self.subsets)


@dataclass(frozen=True)
class IntersectionChoice:
    indices: Tuple[int, ...]
    intersection: FrozenSet[Hashable]
    bound: Fraction

    @property
    def size(self) -> int:
        return len(self.intersection)


def intersection_bound(alpha: Fraction, h: int, ground_size: int) -> Fraction:
    return (Fraction(alpha) / 12) ** (h + 1) * ground_size


def intersection_select(system: SetSystem, h: int) -> IntersectionChoice:
    """h indices (1-based) whose sets meet in at least (alpha/12)^(h+1) |V| elements.

    Among the first M = ceil(2h/alpha) sets, the elements lying in at least h
    of them are collected; each votes for the lexicographically first h sets
    containing it and the most popular h-tuple wins.
    """
    alpha = system.alpha
    if h < 1:
        raise PrecondError(f"h must be >= 1, got {h}")
    if not 0 < alpha < Fraction(1, 2):
        raise PrecondError(f"alpha must lie in (0, 1/2), got {alpha}")
    if system.m < 2 * h / alpha:
        raise PrecondError(f"m = {system.m} is below 2h/alpha = {2 * h / alpha}")
    bound = intersection_bound(alpha, h, len(system.ground))

    if h == 1:
        i = max(range(system.m), key=lambda j: (len(system.subsets[j]), -j))
        choice = IntersectionChoice((i + 1,), system.subsets[i], bound)
    else:
        M = ceil(2 * h / alpha)
        first = system.subsets[:M]
        votes: Counter = Counter()
        for w in sorted(system.ground, key=repr):
            holders = tuple(j for j, V in enumerate(first) if w in V)
            if len(holders) >= h:
                votes[holders[:h]] += 1
        if not votes:
            raise InvariantViolation("no element lies in h of the first M sets")
        top = max(votes.values())
        winner = min(t for t, c in votes.items() if c == top)
        common = frozenset.intersection(*(system.subsets[j] for j in winner))
        choice = IntersectionChoice(tuple(j + 1 for j in winner), common, bound)

    if choice.size < bound:
        raise InvariantViolation(f"intersection of size {choice.size} is below {float(bound):.4f}")
    logger.debug("intersection_select h=%d: sets %s, size %d", h, choice.indices, choice.size)
    return choice
