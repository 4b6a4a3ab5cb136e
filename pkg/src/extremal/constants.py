"""
Constant schedules of the block induction for a forbidden poset P.

For P of height h, size p and largest level r:
  d0       smallest d >= 1 with 2^(d-2)/(d+1) >= r
  s_0 = 1, s_{i+1} the smallest power of 2 above (100 p^3 h s_i)^(2h^2)
  C_0 = 2 h^2 p^3 s_{h-1}^2, C_{l+1} = (1 + 8h/p) C_l, l = 0..q

The s_i are kept as base-2 exponents since they outgrow any practical
integer after a few steps. s_h comes from the same recurrence rather than
being set to the grid side: the induction runs on grids of side s_h, so
s_h is the least side the schedule covers and only s_{h-1} enters C_0.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Tuple

from src.core.errors import InvariantViolation, PrecondError
from src.posets.poset_core import Poset, interpolation_sequence, level_decomposition
from src.utils.logger import get_logger

logger = get_logger(__name__)


def base_dimension(r: int) -> int:
    if r < 1:
        raise PrecondError(f"level size must be >= 1, got {r}")
    d = 1
    while Fraction(2) ** (d - 2) < r * (d + 1):
        d += 1
    return d


def exp_lower_bound(x: Fraction, terms: int) -> Fraction:
    """sum_{j=0}^{terms} x^j / j!, a strict lower bound on e^x for x > 0."""
    x = Fraction(x)
    total, term = Fraction(0), Fraction(1)
    for j in range(terms + 1):
        if j:
            term = term * x / j
        total += term
    return total


@dataclass(frozen=True)
class BoundConstants:
    h: int
    p: int
    r: int
    d0: int
    q: int
    s_exponents: Tuple[int, ...]
    C: Tuple[Fraction, ...]

    def s(self, i: int) -> int:
        return 1 << self.s_exponents[i]

    @property
    def grid_side_exponent(self) -> int:
        """log2 of s_h, the grid side the induction runs on."""
        return self.s_exponents[self.h]

    @property
    def C0(self) -> Fraction:
        return self.C[0]

    @property
    def Cq(self) -> Fraction:
        return self.C[-1]

    @cached_property
    def exponent_proxy(self) -> Optional[float]:
        """log_p(C_q), the per-poset stand-in for the exponent c(h)."""
        if self.p < 2:
            return None
        log_cq = math.log2(self.Cq.numerator) - math.log2(self.Cq.denominator)
        return log_cq / math.log2(self.p)

    def growth_certificate(self) -> Fraction:
        """A rational R with C_q / C_0 <= R < e^(8h)."""
        return exp_lower_bound(Fraction(8 * self.h), self.q)

    def growth_within_bound(self) -> bool:
        growth = (1 + Fraction(8 * self.h, self.p)) ** self.q
        return growth <= self.growth_certificate()


def _next_s_exponent(e: int, p: int, h: int) -> int:
    # (c * 2^e)^(2h^2) has bit length bitlen(c^(2h^2)) + 2h^2 e
    power = 2 * h * h
    return ((100 * p ** 3 * h) ** power).bit_length() + power * e


def compute_constants(P: Poset) -> BoundConstants:
    if P.size == 0:
        raise PrecondError("constants are defined for nonempty posets")
    levels = level_decomposition(P)
    h, p, r = levels.height, P.size, levels.max_level_size
    q = interpolation_sequence(P).q

    exps = [0]
    for _ in range(h):
        exps.append(_next_s_exponent(exps[-1], p, h))

    s_top = Fraction(1 << exps[h - 1])
    C = [2 * h * h * p ** 3 * s_top * s_top]
    ratio = 1 + Fraction(8 * h, p)
    for _ in range(q):
        C.append(C[-1] * ratio)

    constants = BoundConstants(h, p, r, base_dimension(r), q, tuple(exps), tuple(C))
    if not constants.growth_within_bound():
        raise InvariantViolation(f"C_q/C_0 exceeds the e^(8h) certificate for h={h}, p={p}")
    logger.debug("constants h=%d p=%d r=%d d0=%d q=%d s_exp=%s", h, p, r, constants.d0, q, exps)
    return constants
