"""
Finite posets: validation, height, width, levels and the standard constructions.

A Poset is immutable. Its relation is stored transitively closed as a
read-only numpy boolean matrix, with per-element bitmasks derived lazily.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.core.config import CONF
from src.core.errors import CycleError, InputError, InvariantViolation, SizeError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Poset:
    """Strict partial order on labelled elements; lt[x, y] means x < y."""
    labels: Tuple[str, ...]
    lt: np.ndarray

    def __post_init__(self):
        if self.lt.shape != (len(self.labels), len(self.labels)):
            raise InputError("relation matrix does not match the number of labels")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("poset labels must be distinct")
        self.lt.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.lt, other.lt)

    def __hash__(self):
        return hash((self.labels, self.lt.tobytes()))

    def __repr__(self):
        return f"Poset(p={self.size}, pairs={len(self.comparable_pairs())})"

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown poset element: {label!r}") from None

    def less(self, x: int, y: int) -> bool:
        return bool(self.lt[x, y])

    def comparable(self, x: int, y: int) -> bool:
        return bool(self.lt[x, y] or self.lt[y, x])

    @cached_property
    def up_masks(self) -> Tuple[int, ...]:
        """Bitmask of the elements strictly above each element."""
        return tuple(sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.lt)

    @cached_property
    def down_masks(self) -> Tuple[int, ...]:
        return tuple(sum(1 << int(j) for j in np.flatnonzero(col)) for col in self.lt.T)

    def comparable_pairs(self) -> List[Tuple[str, str]]:
        """R(P) as label pairs (x, y) with x < y, in index order."""
        xs, ys = np.nonzero(self.lt)
        return [(self.labels[x], self.labels[y]) for x, y in zip(xs, ys)]

    def is_chain(self) -> bool:
        p = self.size
        return int(self.lt.sum()) == p * (p - 1) // 2

    def is_antichain(self) -> bool:
        return not self.lt.any()

    def relabel(self, labels: Sequence[str]) -> "Poset":
        return Poset(tuple(labels), self.lt.copy())


# ==================== Construction ====================

def _closure(raw: np.ndarray) -> np.ndarray:
    closed = raw.copy()
    for k in range(closed.shape[0]):
        closed |= np.outer(closed[:, k], closed[k, :])
    return closed


def _is_transitive(lt: np.ndarray) -> bool:
    m = lt.astype(np.int64)
    return not bool(((m @ m) > 0)[~lt].any())


def validate_poset(raw_relation, labels: Optional[Sequence[str]] = None) -> Poset:
    """Close a generating relation and check it is a strict partial order."""
    raw = np.array(raw_relation, dtype=bool)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise InputError("relation must be a square boolean matrix")
    p = raw.shape[0]
    labels = tuple(labels) if labels is not None else tuple(f"x{i + 1}" for i in range(p))
    closed = _closure(raw)
    if np.diagonal(closed).any():
        graph = nx.DiGraph()
        graph.add_edges_from(zip(*(a.tolist() for a in np.nonzero(raw))))
        cycle = nx.find_cycle(graph)
        raise CycleError([labels[u] for u, _ in cycle])
    return Poset(labels, closed)


def poset_from_relations(elements: Sequence[str], relations: Iterable[Sequence[str]]) -> Poset:
    index = {label: i for i, label in enumerate(elements)}
    if len(index) != len(elements):
        raise InputError("duplicate element labels")
    raw = np.zeros((len(elements), len(elements)), dtype=bool)
    for pair in relations:
        if len(pair) != 2:
            raise InputError(f"relation must be a pair, got {pair!r}")
        a, b = pair
        if a not in index or b not in index:
            raise InputError(f"relation {a!r} < {b!r} names an unknown element")
        raw[index[a], index[b]] = True
    return validate_poset(raw, elements)


def chain_poset(n: int) -> Poset:
    return complete_multilevel([1] * n).relabel([f"c{i + 1}" for i in range(n)])


def antichain_poset(n: int) -> Poset:
    return Poset(tuple(f"a{i + 1}" for i in range(n)), np.zeros((n, n), dtype=bool))


def complete_multilevel(sizes: Sequence[int]) -> Poset:
    """K_{r1..rh}: h stacked antichains, every element below every higher level."""
    if len(sizes) < 1 or any(r < 1 for r in sizes):
        raise InputError("complete_multilevel needs h >= 1 levels of size >= 1")
    level = np.repeat(np.arange(len(sizes)), sizes)
    labels = tuple(f"L{i + 1}_{j + 1}" for i, r in enumerate(sizes) for j in range(r))
    return Poset(labels, level[:, None] < level[None, :])


def cartesian_product(posets: Sequence[Poset], cap: Optional[int] = None) -> Poset:
    cap = CONF.max_product_elements if cap is None else cap
    total = int(np.prod([P.size for P in posets], dtype=object)) if posets else 1
    if total > cap:
        raise SizeError(f"product has {total} elements, cap is {cap}")
    tuples = list(product(*(range(P.size) for P in posets)))
    coords = np.array(tuples, dtype=np.int64).reshape(total, len(posets))
    le = np.ones((total, total), dtype=bool)
    for axis, P in enumerate(posets):
        factor_le = P.lt | np.eye(P.size, dtype=bool)
        idx = coords[:, axis]
        le &= factor_le[idx[:, None], idx[None, :]]
    lt = le & ~np.eye(total, dtype=bool)
    labels = tuple("(" + ",".join(P.labels[i] for P, i in zip(posets, t)) + ")" for t in tuples)
    return Poset(labels, lt)


def boolean_lattice(n: int) -> Poset:
    """2^[n] as the n-fold product of a 2-chain."""
    return cartesian_product([chain_poset(2)] * n)


# ==================== Height and width ====================

def _relation_graph(P: Poset) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(P.size))
    graph.add_edges_from(zip(*(a.tolist() for a in np.nonzero(P.lt))))
    return graph


def height(P: Poset) -> int:
    if P.size == 0:
        return 0
    return nx.dag_longest_path_length(_relation_graph(P)) + 1


def _dilworth_matching(P: Poset):
    graph = nx.Graph()
    left = [("L", x) for x in range(P.size)]
    graph.add_nodes_from(left)
    graph.add_nodes_from(("R", y) for y in range(P.size))
    graph.add_edges_from((("L", x), ("R", y)) for x, y in zip(*(a.tolist() for a in np.nonzero(P.lt))))
    matching = nx.bipartite.maximum_matching(graph, top_nodes=left)
    return graph, left, matching


def width_exhaustive(P: Poset) -> int:
    """Largest antichain by branching over elements (small posets only)."""
    comp = [u | d for u, d in zip(P.up_masks, P.down_masks)]
    best = 0

    def grow(size: int, cand: int):
        nonlocal best
        if size + cand.bit_count() <= best:
            return
        if cand == 0:
            best = size
            return
        bit = cand & -cand
        x = bit.bit_length() - 1
        grow(size + 1, cand & ~comp[x] & ~bit)
        grow(size, cand & ~bit)

    grow(0, (1 << P.size) - 1)
    return best


def width(P: Poset) -> int:
    """Maximum antichain size via Dilworth: p minus a maximum matching."""
    if P.size == 0:
        return 0
    _, _, matching = _dilworth_matching(P)
    w = P.size - len(matching) // 2
    if P.size <= CONF.width_oracle_max_elements:
        brute = width_exhaustive(P)
        if brute != w:
            raise InvariantViolation(f"width mismatch: matching {w}, exhaustive {brute}")
    return w


def max_antichain(P: Poset) -> Tuple[str, ...]:
    """An antichain of size width(P), read off the Koenig cover of the matching."""
    if P.size == 0:
        return ()
    graph, left, matching = _dilworth_matching(P)
    cover = nx.bipartite.to_vertex_cover(graph, matching, top_nodes=left)
    return tuple(P.labels[x] for x in range(P.size) if ("L", x) not in cover and ("R", x) not in cover)


# ==================== Levels ====================

@dataclass(frozen=True)
class LevelDecomposition:
    """rank[x] is the size of the longest chain whose maximum is x."""
    rank: Tuple[int, ...]
    levels: Tuple[Tuple[int, ...], ...]

    @property
    def height(self) -> int:
        return len(self.levels)

    @property
    def max_level_size(self) -> int:
        return max((len(level) for level in self.levels), default=0)

    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(level) for level in self.levels)


def level_decomposition(P: Poset) -> LevelDecomposition:
    below = P.lt.sum(axis=0)
    rank = [0] * P.size
    # x < y implies x has strictly fewer elements below it
    for y in sorted(range(P.size), key=lambda v: (below[v], v)):
        rank[y] = 1 + max((rank[x] for x in np.flatnonzero(P.lt[:, y])), default=0)
    h = max(rank, default=0)
    levels = tuple(tuple(x for x in range(P.size) if rank[x] == i) for i in range(1, h + 1))
    return LevelDecomposition(tuple(rank), levels)


# ==================== Interpolation sequence ====================

@dataclass(frozen=True)
class InterpolationSequence:
    """P_0 = K_{|A1|..|Ah|} morphing into P_q = P one enumerated element at a time.

    order holds z_1..z_p as element indices; splits[l] is the up-set S of
    z_{l+1} whose pairs S x (P \\ S) are removed to pass from P_l to P_{l+1}.
    """
    source: Poset
    levels: LevelDecomposition
    order: Tuple[int, ...]
    steps: Tuple[Poset, ...]
    splits: Tuple[FrozenSet[int], ...]

    @property
    def q(self) -> int:
        return len(self.steps) - 1

    def step(self, l: int) -> Poset:
        return self.steps[l]

    def z(self, i: int) -> str:
        """Label of z_i (1-indexed)."""
        return self.source.labels[self.order[i - 1]]


def interpolation_sequence(P: Poset) -> InterpolationSequence:
    levels = level_decomposition(P)
    rank = np.array(levels.rank, dtype=np.int64)
    order = tuple(sorted(range(P.size), key=lambda x: (levels.rank[x], x)))
    q = P.size - (len(levels.levels[-1]) if levels.levels else 0)

    current = rank[:, None] < rank[None, :]
    steps = [Poset(P.labels, current.copy())]
    splits = []
    for l in range(q):
        z = order[l]
        in_s = P.lt[z].copy()
        in_s[z] = True
        current = current & ~(in_s[:, None] & ~in_s[None, :])
        if not _is_transitive(current):
            raise InvariantViolation(f"P_{l + 1} lost transitivity after removing the split of {P.labels[z]}")
        steps.append(Poset(P.labels, current.copy()))
        splits.append(frozenset(int(x) for x in np.flatnonzero(in_s)))
    if steps[-1] != P:
        raise InvariantViolation("interpolation sequence does not end at the source poset")
    logger.debug("interpolation sequence: p=%d q=%d", P.size, q)
    return InterpolationSequence(P, levels, order, tuple(steps), tuple(splits))
