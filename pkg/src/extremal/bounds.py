"""
Closed-form bounds on families avoiding posets and related structures.

Every bound with explicit constants is evaluated exactly. Asymptotic bounds
are reported as formula times CONF.bound_constant and flagged as such.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import List, Optional, Union

from src.core.config import CONF
from src.core.errors import PrecondError
from src.decomposition.width import rank_profile
from src.extremal.constants import base_dimension
from src.grids.grid_core import GridShape
from src.posets.poset_core import Poset, interpolation_sequence, level_decomposition

Number = Union[int, Fraction, float]


def sperner_bound(n: int) -> int:
    return comb(n, n // 2)


def erdos_chain_bound(n: int, k: int) -> int:
    """Largest sum of k-1 consecutive binomial coefficients C(n, i)."""
    if k < 1:
        raise PrecondError(f"chain size must be >= 1, got {k}")
    if k == 1:
        return 0
    return max(sum(comb(n, i) for i in range(l, l + k - 1)) for l in range(0, n + 1))


def strong_chain_bound(k: int, d: int, h: int) -> int:
    return d * (h - 1) * k ** (d - 1)


def strong_multilevel_bound(k: int, d: int, h: int) -> int:
    return 4 * d * (h - 1) * k ** (d - 1)


def strong_multilevel_applies(d: int, r: int) -> bool:
    return d >= 2 and 2 ** (d - 2) >= r * (d + 1)


@dataclass(frozen=True)
class DenseThreshold:
    """(8 d0 (h-1) + 4 l h k^((h-1)/h)) k^(d-1), compared exactly through h-th powers."""
    k: int
    d0: int
    h: int
    l: int
    d: int

    @property
    def base(self) -> int:
        return 8 * self.d0 * (self.h - 1) * self.k ** (self.d - 1)

    @property
    def coefficient(self) -> int:
        return 4 * self.l * self.h * self.k ** (self.d - 1)

    def exceeded_by(self, size: int) -> bool:
        excess = size - self.base
        if excess <= 0:
            return False
        if self.coefficient == 0:
            return True
        return excess ** self.h > self.coefficient ** self.h * self.k ** (self.h - 1)

    def approx(self) -> float:
        return self.base + self.coefficient * self.k ** ((self.h - 1) / self.h)


def dense_extraction_threshold(k: int, d0: int, h: int, l: int, d: Optional[int] = None) -> DenseThreshold:
    return DenseThreshold(k, d0, h, l, d0 + l if d is None else d)


def weak_grid_dimension(p: int) -> int:
    """ceil(2 log2 p) + 5."""
    return (p * p - 1).bit_length() + 5


def weak_grid_constant(p: int, h: int) -> int:
    return 4 * weak_grid_dimension(p) * (h - 1)


def kleitman_union_free_bound(n: int) -> Fraction:
    return Fraction(comb(n, -(-n // 2))) + Fraction(2 ** n, n)


def boolean_algebra_grid_bound(k: int, n: int, d: int) -> float:
    """k^(n - 1/2^(d-1)) n^(-1/2^d), up to the unspecified constant."""
    return float(CONF.bound_constant) * k ** (n - 1 / 2 ** (d - 1)) * n ** (-1 / 2 ** d)


def boolean_algebra_square_bound(k: int, d: int) -> float:
    """k^(d - 1/2^(d-1)) on [k]^d, the hypergraph Turan estimate."""
    return k ** (d - 1 / 2 ** (d - 1))


# ==================== Catalog ====================

@dataclass(frozen=True)
class BoundEntry:
    name: str
    formula: str
    value: Optional[Number]
    exact: bool = True
    applicable: bool = True
    note: str = ""


@dataclass
class BoundCatalog:
    n: int
    k: int
    h: int
    p: int
    r: int
    width: int
    entries: List[BoundEntry] = field(default_factory=list)

    def add(self, *args, **kwargs):
        self.entries.append(BoundEntry(*args, **kwargs))

    def get(self, name: str) -> BoundEntry:
        return next(e for e in self.entries if e.name == name)


def bound_catalog(P: Poset, n: int, k: int, d: int = 2) -> BoundCatalog:
    """Bounds for families in [k]^n avoiding P; d is the Boolean algebra dimension."""
    if n < 1 or k < 1 or d < 1:
        raise PrecondError(f"need n, k, d >= 1, got n={n}, k={k}, d={d}")
    levels = level_decomposition(P)
    h, p, r = levels.height, P.size, levels.max_level_size
    w = max(rank_profile(GridShape.uniform(k, n)))
    const = CONF.bound_constant
    cat = BoundCatalog(n, k, h, p, r, w)
    unspecified = "constant unspecified; value is formula times bound_constant"

    cat.add("width", "w = width of [k]^n", w)
    if k == 2:
        cat.add("sperner", "C(n, floor(n/2))", sperner_bound(n))
        cat.add("erdos_chain", "max sum of h-1 consecutive C(n, i)", erdos_chain_bound(n, h),
                note="families free of a chain of size h")
        cat.add("kleitman_union_free", "C(n, ceil(n/2)) + 2^n/n", kleitman_union_free_bound(n),
                note="reported, not checked")
    cat.add("chain_grid", "(h-1) w", (h - 1) * w, note="families free of a chain of size h")
    cat.add("weak_trivial", "(p-1) w", (p - 1) * w, note="P is a weak subposet of a p-chain")
    cat.add("weak_asymptotic", "O(h log(p/h + 2)) C(n, floor(n/2))",
            float(const) * h * math.log2(p / h + 2) * comb(n, n // 2) if k == 2 else None,
            exact=False, applicable=k == 2, note=unspecified)
    cat.add("weak_grid", "O(w h log^(3/2) p)",
            float(const) * w * h * math.log2(p) ** 1.5 if p > 1 else None,
            exact=False, applicable=n >= 2 * math.log2(max(p, 1)), note=unspecified)
    d_weak = weak_grid_dimension(p)
    cat.add("weak_grid_dimension", "ceil(2 log2 p) + 5", d_weak)
    cat.add("weak_grid_constant", "4 d (h-1)", weak_grid_constant(p, h))
    cat.add("boolean_algebra", "O(k^(n - 1/2^(d-1)) n^(-1/2^d))",
            boolean_algebra_grid_bound(k, n, d) if k >= 2 else None,
            exact=False, applicable=k >= 2 and n >= d,
            note=f"families free of a {d}-dimensional Boolean algebra; " + unspecified)
    cat.add("boolean_algebra_square", "k^(d - 1/2^(d-1)) on [k]^d", boolean_algebra_square_bound(k, d),
            exact=False, applicable=n == d,
            note="hypergraph Turan bound for K_(2,...,2); irrational, reported as a float")
    cat.add("induced_main", "|P|^c(h) w", None, exact=False, applicable=n > 2 * p,
            note="c(h) = 2^O(h log h); see the constants command for the exact C_q")
    if h == 2:
        top = len(levels.levels[-1])
        a, b = sorted((p - top, top))
        cat.add("induced_height_two", "a^O(1) (log b)^O(1) w", None, exact=False,
                note=f"a={a}, b={b}; exponents unspecified")

    cat.add("strong_chain", "d (h-1) k^(d-1), d = n", strong_chain_bound(k, n, h),
            note="families in [k]^n free of a strong h-chain")
    cat.add("strong_multilevel", "4 d (h-1) k^(d-1), d = n", strong_multilevel_bound(k, n, h),
            applicable=strong_multilevel_applies(n, r),
            note="families free of a strong K^h_r; needs 2^(d-2)/(d+1) >= r")
    d0 = base_dimension(r)
    q = interpolation_sequence(P).q
    threshold = dense_extraction_threshold(k, d0, h, q)
    cat.add("dense_extraction", "(8 d0 (h-1) + 4 q h k^((h-1)/h)) k^(d0+q-1)", threshold.approx(),
            exact=False, applicable=n == d0 + q,
            note=f"d0={d0}, q={q}; membership decided exactly via h-th powers")
    return cat
