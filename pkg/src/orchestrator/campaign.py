# src/orchestrator/campaign.py
"""
verify-bounds campaigns.

A suite is a list of checks, each a named parameter grid. Checks become
nodes of a small DAG (edges from their `after` lists) and run in
topological order; every check yields rows {check, params, bound, measured,
status}. Randomized checks draw from random.Random seeded by the suite seed
and the node position, so reports do not depend on threads.
"""
import random
import sys
import traceback
from collections import defaultdict, deque
from fractions import Fraction
from itertools import combinations
from math import ceil, prod
from typing import Any, Callable, Dict, List, Optional, Set

from tqdm import tqdm

from src.api.schemas import SuiteCheck, SuiteFile
from src.core.config import CONF, Config
from src.core.errors import BudgetExceeded, ContractUnmet, PosetGridError, PrecondError
from src.core.workers import run_ordered
from src.decomposition.chains import long_chain_target, partition_long_chains
from src.decomposition.grids import partition_into_grids
from src.decomposition.width import grid_width, grid_width_dilworth
from src.detectors.copy_finder import CopyMode, find_copy, find_copy_exhaustive, verify_embedding
from src.detectors.join_detector import join_from_bad_elements
from src.detectors.strong_extraction import (
    extract_strong_chain, extract_strong_copy_dense, find_copy_via_fat_blocks,
)
from src.extremal.bounds import (
    erdos_chain_bound, sperner_bound, strong_chain_bound, strong_multilevel_applies, strong_multilevel_bound,
)
from src.extremal.constants import base_dimension, compute_constants
from src.extremal.intersection import SetSystem, intersection_select
from src.extremal.search import (
    max_avoiding, max_avoiding_exhaustive, max_no_boolean_algebra, max_no_boolean_algebra_exhaustive,
    max_no_join,
)
from src.grids.grid_core import Family, GridShape, block_decompose
from src.posets.poset_core import (
    Poset, chain_poset, complete_multilevel, height, interpolation_sequence, level_decomposition,
    poset_from_relations,
)
from src.utils.io_utils import load_poset
from src.utils.logger import get_logger

logger = get_logger(__name__)

PASS, FAIL, INCOMPLETE = "PASS", "FAIL", "INCOMPLETE"
Row = Dict[str, Any]


def _row(check: str, params: Dict[str, Any], bound: Any, measured: Any, ok: bool,
         complete: bool = True) -> Row:
    status = INCOMPLETE if not complete else (PASS if ok else FAIL)
    return {"check": check, "params": params, "bound": bound, "measured": measured, "status": status}


def random_poset(rng: random.Random, p: int, density: float = 0.4) -> Poset:
    """Random order on p elements: relations i < j drawn for i < j, then closed."""
    labels = [f"e{i}" for i in range(p)]
    relations = [(labels[i], labels[j]) for i, j in combinations(range(p), 2) if rng.random() < density]
    return poset_from_relations(labels, relations)


def random_family(rng: random.Random, shape: GridShape, size: int) -> Family:
    return Family.from_indices(shape, rng.sample(range(shape.size), min(size, shape.size)))


def planted_extraction_family(rng: random.Random, P: Poset, l: int, noise: int = 0) -> Family:
    """Sparse family over [9]^(2+l) holding a strong copy of step l of a height-2 P.

    A strong K_{r1,r2} sits on two antidiagonals of [9]^2. Each lift extends
    every planted point by the column {a, 4, 5, 6, b} with a in 1..3 and b in
    7..9, whose only good member at scale 3 is 5. Adding points never removes
    a witness, so noise random points keep the planted copy extractable.
    """
    sizes = level_decomposition(P).sizes()
    if len(sizes) != 2 or sizes[0] > 4 or sizes[1] > 5:
        raise PrecondError(f"level sizes {sizes} do not fit two antidiagonals of [9]^2")
    points = [(4 * i + j, 4 * i + r + 1 - j) for i, r in enumerate(sizes) for j in range(1, r + 1)]
    for _ in range(l):
        points = [x + (c,) for x in points for c in (rng.randint(1, 3), 4, 5, 6, rng.randint(7, 9))]
    shape = GridShape.uniform(9, 2 + l)
    return Family.from_points(shape, points) | random_family(rng, shape, noise)


# ==================== Checks ====================

def check_sperner(params, rng, conf) -> List[Row]:
    rows = []
    for n in range(1, params.get("n_max", 8) + 1):
        w = grid_width(GridShape.uniform(2, n))
        rows.append(_row("sperner", {"n": n}, sperner_bound(n), w, w == sperner_bound(n)))
    return rows


def check_erdos(params, rng, conf) -> List[Row]:
    rows = []
    for n, k in params.get("cases", [[2, 2], [3, 2], [3, 3], [4, 2], [4, 3]]):
        shape = GridShape.uniform(2, n)
        res = max_avoiding(shape, chain_poset(k), CopyMode.WEAK, budget=conf.budget, threads=conf.threads)
        bound = erdos_chain_bound(n, k)
        ok = res.optimum == bound
        if res.complete and shape.size <= conf.exhaustive_oracle_max_points:
            oracle = max_avoiding_exhaustive(shape, chain_poset(k), CopyMode.WEAK, budget=conf.budget)
            ok = ok and (not oracle.complete or oracle.optimum == res.optimum)
        rows.append(_row("erdos", {"n": n, "k": k}, bound, res.optimum, ok, res.complete))
    return rows


def check_strong_chain(params, rng, conf) -> List[Row]:
    rows = []
    cap = params.get("max_points", 64)
    goldens = params.get("goldens", {})
    budget = params.get("budget", conf.budget)
    for k in range(2, params.get("k_max", 3) + 1):
        for d in range(1, params.get("d_max", 2) + 1):
            if k ** d > cap:
                continue
            for h in range(2, params.get("h_max", 3) + 1):
                res = max_avoiding(GridShape.uniform(k, d), chain_poset(h), CopyMode.STRONG,
                                   budget=budget, threads=conf.threads)
                bound = strong_chain_bound(k, d, h)
                ok = res.optimum <= bound
                golden = goldens.get(f"{k},{d},{h}")
                if golden is not None:
                    ok = ok and res.optimum == golden
                rows.append(_row("strong_chain", {"k": k, "d": d, "h": h}, bound, res.optimum, ok, res.complete))
    return rows


def check_strong_multilevel(params, rng, conf) -> List[Row]:
    rows = []
    budget = params.get("budget", conf.budget)
    for k, d, h, r in params.get("cases", [[2, 5, 2, 1]]):
        if not strong_multilevel_applies(d, r):
            logger.info("strong_multilevel: d=%d r=%d outside the range of the bound, skipped", d, r)
            continue
        res = max_avoiding(GridShape.uniform(k, d), complete_multilevel([r] * h), CopyMode.STRONG,
                           budget=budget, threads=conf.threads)
        bound = strong_multilevel_bound(k, d, h)
        rows.append(_row("strong_multilevel", {"k": k, "d": d, "h": h, "r": r}, bound, res.optimum,
                         res.optimum <= bound, res.complete))
    return rows


def check_long_chains(params, rng, conf) -> List[Row]:
    rows = []
    default = [[2, n] for n in range(2, 9)] + [[3, 2], [3, 3], [3, 4], [4, 2], [4, 3], [5, 2]]
    for k, n in params.get("cases", default):
        shape = GridShape.uniform(k, n)
        w = grid_width(shape)
        target = long_chain_target(shape, w)
        try:
            part = partition_long_chains(shape)
            measured, ok = part.min_size, part.count == w and part.min_size >= target
        except ContractUnmet as e:
            logger.warning("long_chains %s: %s", shape.sides, e)
            measured, ok = None, False
        rows.append(_row("long_chains", {"k": k, "n": n, "w": w}, target, measured, ok))
    return rows


def check_grid_partition(params, rng, conf) -> List[Row]:
    rows = []
    for k, n, d in params.get("cases", [[2, 4, 2], [2, 6, 2], [2, 6, 3], [3, 4, 2]]):
        part = partition_into_grids(GridShape.uniform(k, n), d, threads=conf.threads)
        expected = prod(f.count for f in part.factors)
        rows.append(_row("grid_partition", {"k": k, "n": n, "d": d}, expected, len(part.parts),
                         part.verify() and len(part.parts) == expected))
    return rows


def check_join2d(params, rng, conf) -> List[Row]:
    rows = []
    budget = params.get("budget", conf.budget)
    for k in range(1, params.get("k_max", 3) + 1):
        for l in range(1, params.get("l_max", 3) + 1):
            res = max_no_join(GridShape((k, l)), budget=budget, threads=conf.threads)
            rows.append(_row("join2d", {"k": k, "l": l}, k + l, res.optimum, res.optimum <= k + l, res.complete))

    side_max = params.get("replay_side_max", 5)
    sides = [(k, l) for k in range(2, side_max + 1) for l in range(2, side_max + 1) if k * l > k + l]
    failures = 0
    for _ in range(params.get("trials", 500)):
        k, l = rng.choice(sides)
        F = random_family(rng, GridShape((k, l)), rng.randint(k + l + 1, k * l))
        try:
            triple = join_from_bad_elements(F)
            failures += triple is None or not triple.is_valid_in(F)
        except PosetGridError:
            failures += 1
    rows.append(_row("join2d", {"replay_trials": params.get("trials", 500)}, 0, failures, failures == 0))
    return rows


def check_boolean(params, rng, conf) -> List[Row]:
    default = [
        {"shape": [2, 2], "d": 1}, {"shape": [2, 2, 2], "d": 1},
        {"shape": [2, 2, 2, 2], "d": 1}, {"shape": [3, 3], "d": 2, "expected": 6},
    ]
    rows = []
    for case in params.get("cases", default):
        shape, d = GridShape(tuple(case["shape"])), case["d"]
        expected = case.get("expected")
        if expected is None and d == 1 and set(shape.sides) == {2}:
            expected = sperner_bound(shape.n)
        res = max_no_boolean_algebra(shape, d, budget=conf.budget, threads=conf.threads)
        ok = expected is None or res.optimum == expected
        if res.complete and shape.size <= conf.exhaustive_oracle_max_points:
            oracle = max_no_boolean_algebra_exhaustive(shape, d, budget=conf.budget)
            ok = ok and (not oracle.complete or oracle.optimum == res.optimum)
        rows.append(_row("boolean", {"shape": list(shape.sides), "d": d}, expected, res.optimum, ok, res.complete))
    return rows


def _intersection_trial(rng: random.Random, h_max: int, ground_max: int) -> bool:
    N = rng.randint(10, ground_max)
    alpha = Fraction(1, rng.randint(3, 8))
    h = rng.randint(1, h_max)
    m = ceil(2 * h / alpha) + rng.randint(0, 3)
    low = ceil(alpha * N)
    subsets = [rng.sample(range(N), rng.randint(low, max(low, N * 3 // 4))) for _ in range(m)]
    try:
        choice = intersection_select(SetSystem.build(range(N), subsets, alpha), h)
    except PosetGridError as e:
        logger.warning("intersection trial N=%d h=%d: %s", N, h, e)
        return False
    return len(choice.indices) == h and choice.size >= choice.bound


def check_intersection(params, rng, conf) -> List[Row]:
    trials = params.get("trials", 1000)
    seeds = [rng.getrandbits(64) for _ in range(trials)]
    h_max, ground_max = params.get("h_max", 3), params.get("ground_max", 60)
    outcomes = run_ordered(lambda s: _intersection_trial(random.Random(s), h_max, ground_max), seeds, conf.threads)
    failures = outcomes.count(False)
    return [_row("intersection", {"trials": trials, "h_max": h_max}, 0, failures, failures == 0)]


def _interpolation_ok(P: Poset) -> bool:
    try:
        seq = interpolation_sequence(P)
    except PosetGridError:
        return False
    rank = seq.levels.rank
    K = [[rank[x] < rank[y] for y in range(P.size)] for x in range(P.size)]
    if seq.steps[0].lt.tolist() != K or seq.steps[-1] != P:
        return False
    for l in range(seq.q):
        if (seq.steps[l + 1].lt & ~seq.steps[l].lt).any():
            return False
    for l, step in enumerate(seq.steps):
        for i in range(l):
            for j in range(i + 1, P.size):
                a, b = seq.order[i], seq.order[j]
                if step.lt[a, b] != P.lt[a, b]:
                    return False
    return True


def check_interpolation(params, rng, conf) -> List[Row]:
    trials, p_max = params.get("trials", 200), params.get("p_max", 7)
    posets = [random_poset(rng, rng.randint(1, p_max), rng.uniform(0.1, 0.7)) for _ in range(trials)]
    failures = run_ordered(_interpolation_ok, posets, conf.threads).count(False)
    return [_row("interpolation", {"trials": trials, "p_max": p_max}, 0, failures, failures == 0)]


def _small_height_two(rng: random.Random, p_max: int) -> Poset:
    while True:
        P = random_poset(rng, rng.randint(1, p_max), rng.uniform(0.2, 0.8))
        if height(P) <= 2:
            return P


def check_extraction(params, rng, conf) -> List[Row]:
    """Dense extraction over [s^h]^(2+l) for random posets of height <= 2.

    Height-2 trials alternate between full grids and planted sparse families
    with random noise; the rest run on full grids.
    """
    trials, l_max = params.get("trials", 50), params.get("l_max", 1)
    found = failures = sparse = 0
    for _ in range(trials):
        P = _small_height_two(rng, params.get("p_max", 3))
        h = height(P)
        l = rng.randint(0, min(l_max, interpolation_sequence(P).q))
        k = 9 if h == 2 else 3
        sizes = level_decomposition(P).sizes()
        if h == 2 and sizes[0] <= 4 and sizes[1] <= 5 and rng.random() < 0.5:
            F = planted_extraction_family(rng, P, l, noise=rng.randint(0, 9 ** (2 + l) // 10))
            sparse += 1
        else:
            F = Family.full(GridShape.uniform(k, 2 + l))
        try:
            e = extract_strong_copy_dense(F, P, l, enforce_threshold=False)
        except PosetGridError as err:
            logger.warning("extraction trial failed: %s", err)
            failures += 1
            continue
        if e is not None and verify_embedding(F, interpolation_sequence(P).step(l), e):
            found += 1
        else:
            failures += 1
    logger.info("extraction: %d of %d trials on planted sparse families", sparse, trials)
    return [_row("extraction", {"trials": trials, "l_max": l_max}, trials, found, failures == 0)]


def _fat_block_trial(rng: random.Random, p_max: int) -> bool:
    P = _small_height_two(rng, p_max)
    seq = interpolation_sequence(P)
    h, l = seq.levels.height, rng.randint(0, seq.q)
    side, n = 4, 3
    shape = GridShape.uniform(2 * side, n)
    blocks = block_decompose(shape, side)
    prefix = tuple(rng.randint(1, 2) for _ in range(n - 1))
    stack = [prefix + (t,) for t in sorted(rng.sample([1, 2], h))]
    proj_shape = GridShape.uniform(side, n - 1)
    G = random_family(rng, proj_shape, rng.randint(1, proj_shape.size))
    points = []
    for u in stack:
        for g in G:
            base = tuple(side * (ui - 1) + gi for ui, gi in zip(u[:-1], g))
            points.extend(base + (side * (u[-1] - 1) + t,) for t in range(1, side + 1))
    F = Family.from_points(shape, points)
    e = find_copy_via_fat_blocks(stack, F, P, l, blocks)
    expected = find_copy(G, seq.step(l), CopyMode.STRONG)
    if e is None:
        return expected is None
    return expected is not None and verify_embedding(F, seq.step(l), e)


def check_fat_blocks(params, rng, conf) -> List[Row]:
    trials = params.get("trials", 50)
    failures = 0
    for _ in range(trials):
        try:
            failures += not _fat_block_trial(rng, params.get("p_max", 3))
        except PosetGridError as e:
            logger.warning("fat block trial failed: %s", e)
            failures += 1
    return [_row("fat_blocks", {"trials": trials}, 0, failures, failures == 0)]


def _oracle_trial(seed: int, f_max: int, p_max: int) -> bool:
    rng = random.Random(seed)
    shape = GridShape(tuple(rng.choice((2, 3)) for _ in range(rng.randint(2, 3))))
    F = random_family(rng, shape, rng.randint(0, min(f_max, shape.size)))
    P = random_poset(rng, rng.randint(1, p_max), rng.uniform(0.2, 0.8))
    mode = rng.choice(list(CopyMode))
    fast = find_copy(F, P, mode)
    slow = find_copy_exhaustive(F, P, mode)
    if fast is None:
        return slow is None
    return slow is not None and verify_embedding(F, P, fast)


def check_oracle(params, rng, conf) -> List[Row]:
    trials = params.get("trials", 1000)
    f_max, p_max = params.get("f_max", 12), params.get("p_max", 4)
    seeds = [rng.getrandbits(64) for _ in range(trials)]
    failures = run_ordered(lambda s: _oracle_trial(s, f_max, p_max), seeds, conf.threads).count(False)
    return [_row("oracle", {"trials": trials, "f_max": f_max, "p_max": p_max}, 0, failures, failures == 0)]


def check_constants(params, rng, conf) -> List[Row]:
    rows = [
        _row("constants", {"r": 1}, 5, base_dimension(1), base_dimension(1) == 5),
        _row("constants", {"r": 2}, 6, base_dimension(2), base_dimension(2) == 6),
    ]
    for shorthand in params.get("posets", ["chain:1", "chain:3", "K:2,2", "antichain:3"]):
        consts = compute_constants(load_poset(shorthand))
        rows.append(_row("constants", {"poset": shorthand, "h": consts.h, "q": consts.q},
                         consts.growth_certificate(), (1 + Fraction(8 * consts.h, consts.p)) ** consts.q,
                         consts.growth_within_bound() and consts.s_exponents[0] == 0))
    return rows


def check_width(params, rng, conf) -> List[Row]:
    rows = []
    for sides in params.get("cases", [[3, 3], [3, 3, 3], [2, 2, 2, 2], [4, 4], [2, 3, 4]]):
        shape = GridShape(tuple(sides))
        w, oracle = grid_width(shape), grid_width_dilworth(shape)
        rows.append(_row("width", {"shape": sides}, oracle, w, w == oracle))
    return rows


def check_strong_chain_peel(params, rng, conf) -> List[Row]:
    trials = params.get("trials", 100)
    cases = [(k, d, h) for k in range(3, 7) for d in range(1, 4) for h in (2, 3)
             if d * (h - 1) < k and k ** d <= 4096]
    failures = 0
    for _ in range(trials):
        k, d, h = rng.choice(cases)
        shape = GridShape.uniform(k, d)
        F = random_family(rng, shape, rng.randint(strong_chain_bound(k, d, h) + 1, shape.size))
        try:
            failures += extract_strong_chain(F, h) is None
        except PosetGridError as e:
            logger.warning("peel trial %s h=%d: %s", shape.sides, h, e)
            failures += 1
    return [_row("strong_chain_peel", {"trials": trials}, 0, failures, failures == 0)]


CHECKS: Dict[str, Callable[[Dict[str, Any], random.Random, Config], List[Row]]] = {
    "sperner": check_sperner,
    "erdos": check_erdos,
    "strong_chain": check_strong_chain,
    "strong_multilevel": check_strong_multilevel,
    "long_chains": check_long_chains,
    "grid_partition": check_grid_partition,
    "join2d": check_join2d,
    "boolean": check_boolean,
    "intersection": check_intersection,
    "interpolation": check_interpolation,
    "extraction": check_extraction,
    "fat_blocks": check_fat_blocks,
    "oracle": check_oracle,
    "constants": check_constants,
    "width": check_width,
    "strong_chain_peel": check_strong_chain_peel,
}


# ==================== Check graph ====================

class CheckNode:
    def __init__(self, name: str, entry: SuiteCheck, position: int):
        self.name = name
        self.entry = entry
        self.position = position
        self.rows: List[Row] = []
        self.status = "PENDING"
        self.error: Optional[str] = None

    def run(self, ctx: Dict[str, Any], conf: Config, seed: int):
        self.status = "RUNNING"
        rng = random.Random(seed * 1_000_003 + self.position)
        try:
            self.rows = CHECKS[self.entry.check](self.entry.params, rng, conf)
            self.status = "SUCCESS"
        except BudgetExceeded as e:
            self.status = "FAILED"
            self.error = str(e)
            self.rows = [_row(self.entry.check, self.entry.params, None, None, False, complete=False)]
        except PosetGridError as e:
            self.status = "FAILED"
            self.error = str(e) + "\n" + traceback.format_exc()
            logger.error("check %s failed: %s", self.name, e)
            self.rows = [_row(self.entry.check, self.entry.params, None, type(e).__name__, False)]
        for row in self.rows:
            row["name"] = self.name
            row["golden"] = self.entry.golden
        ctx[self.name] = self.rows
        return self.rows


class CheckGraph:
    def __init__(self):
        self.nodes: Dict[str, CheckNode] = {}
        self.edges: Dict[str, Set[str]] = defaultdict(set)  # u -> set(v) (u must run before v)
        self.rev_edges: Dict[str, Set[str]] = defaultdict(set)

    def add_node(self, name: str, entry: SuiteCheck):
        if name in self.nodes:
            raise ValueError("Node exists: " + name)
        self.nodes[name] = CheckNode(name, entry, len(self.nodes))

    def add_edge(self, from_node: str, to_node: str):
        if from_node not in self.nodes or to_node not in self.nodes:
            raise KeyError("Missing node")
        self.edges[from_node].add(to_node)
        self.rev_edges[to_node].add(from_node)

    def _toposort(self) -> List[str]:
        indeg = {n: len(self.rev_edges.get(n, [])) for n in self.nodes}
        q = deque([n for n, d in indeg.items() if d == 0])
        order = []
        while q:
            u = q.popleft()
            order.append(u)
            for v in sorted(self.edges.get(u, []), key=lambda n: self.nodes[n].position):
                indeg[v] -= 1
                if indeg[v] == 0:
                    q.append(v)
        if len(order) != len(self.nodes):
            raise ValueError("suite checks form a cycle")
        return order

    def run(self, conf: Config, seed: int, quiet: bool = False) -> Dict[str, List[Row]]:
        ctx: Dict[str, List[Row]] = {}
        order = self._toposort()
        bar = tqdm(order, desc="verify-bounds", unit="check", file=sys.stderr,
                   disable=quiet or not sys.stderr.isatty())
        for name in bar:
            bar.set_postfix_str(name)
            self.nodes[name].run(ctx, conf, seed)
        return ctx


def build_graph(suite: SuiteFile) -> CheckGraph:
    graph = CheckGraph()
    names = [c.name or f"{c.check}#{i}" for i, c in enumerate(suite.checks)]
    for name, entry in zip(names, suite.checks):
        graph.add_node(name, entry)
    for name, entry in zip(names, suite.checks):
        for before in entry.after:
            graph.add_edge(before, name)
    return graph


def run_suite(suite: SuiteFile, conf: Config = CONF, quiet: bool = False) -> List[Row]:
    """Rows of every check in suite order of execution."""
    seed = conf.seed if suite.seed is None else suite.seed
    graph = build_graph(suite)
    logger.info("suite %s: %d checks, seed %d", suite.name, len(graph.nodes), seed)
    ctx = graph.run(conf, seed, quiet)
    return [row for name in graph._toposort() for row in ctx[name]]


def suite_failed(rows: List[Row]) -> bool:
    return any(r["status"] == FAIL or (r["status"] == INCOMPLETE and r.get("golden")) for r in rows)
