"""
CLI commands.

Each command validates its inputs, calls the library and returns a
CommandResult: the canonical report body, the table rows mirrored into CSV
and the exit code the process should end with.
"""
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from src.api.schemas import SuiteFile
from src.core.config import CONF, Config
from src.core.errors import ContractUnmet, PrecondError
from src.core.report import build_report
from src.decomposition.chains import long_chain_target, partition_long_chains
from src.decomposition.grids import partition_into_grids
from src.decomposition.width import grid_width, rank_profile, width_estimate
from src.detectors.boolean_algebra import find_boolean_algebra
from src.detectors.copy_finder import CopyMode, find_copy
from src.detectors.join_detector import find_join_triple
from src.detectors.strong_extraction import extract_strong_chain
from src.extremal.bounds import bound_catalog
from src.extremal.constants import compute_constants
from src.extremal.search import ExtremalResult, max_avoiding, max_no_boolean_algebra, max_no_join
from src.grids.grid_core import Family, GridShape
from src.orchestrator.campaign import run_suite, suite_failed
from src.posets.poset_core import Poset, height
from src.utils.io_utils import embedding_to_dict, poset_to_dict, save_partition
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_BUDGET = 0, 2, 3
# integers wider than this are reported through their base-2 logarithm
MAX_EXACT_BITS = 512


@dataclass
class CommandResult:
    report: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    exit_code: int = EXIT_OK


def _finish(command: str, inputs: Dict[str, Any], results: Dict[str, Any], rows: List[Dict[str, Any]],
            conf: Config, started: float, timing: bool, exit_code: int = EXIT_OK,
            status: str = "OK") -> CommandResult:
    elapsed = time.monotonic() - started
    logger.info("%s finished in %.3fs with status %s", command, elapsed, status)
    report = build_report(command, inputs, results, status, conf, elapsed if timing else None)
    return CommandResult(report, rows, exit_code)


def render_big(value) -> Any:
    """Exact value when small; '2^e' for powers of two; otherwise '~2^x' with x to 6 decimals."""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    if max(num.bit_length(), den.bit_length()) <= MAX_EXACT_BITS:
        return value
    if den == 1 and num & (num - 1) == 0:
        return f"2^{num.bit_length() - 1}"
    return f"~2^{_log2(value):.6f}"


def _log2(value: Fraction) -> float:
    def lg(x: int) -> float:
        shift = max(0, x.bit_length() - 64)
        return math.log2(x >> shift) + shift
    return lg(value.numerator) - lg(value.denominator)


def _extremal_dict(res: ExtremalResult) -> Dict[str, Any]:
    return {
        "optimum": res.optimum,
        "status": res.status,
        "complete": res.complete,
        "nodes": res.nodes,
        "root_bound": res.root_bound,
        "structure": res.structure,
        "witness": [list(x) for x in res.witness],
    }


# ==================== Commands ====================

def cmd_width(shape: GridShape, conf: Config = CONF, timing: bool = False) -> CommandResult:
    started = time.monotonic()
    results: Dict[str, Any] = {"exact": grid_width(shape), "rank_profile": rank_profile(shape)}
    if shape.is_uniform and shape.side >= 2:
        est = width_estimate(shape)
        results.update(estimate=est.estimate, ratio=est.ratio)
    row = {"shape": list(shape.sides), **{k: v for k, v in results.items() if k != "rank_profile"}}
    return _finish("width", {"shape": list(shape.sides)}, results, [row], conf, started, timing)


def cmd_partition(shape: GridShape, mode: str = "chains", d: Optional[int] = None,
                  partition_out: Optional[str] = None, conf: Config = CONF,
                  timing: bool = False) -> CommandResult:
    started = time.monotonic()
    inputs = {"shape": list(shape.sides), "mode": mode, "d": d}
    if mode == "chains":
        w = grid_width(shape)
        target = long_chain_target(shape, w)
        try:
            partition = partition_long_chains(shape)
        except ContractUnmet as e:
            logger.warning("partition %s: %s", shape.sides, e)
            results = {"width": w, "target": target, "verdict": "FAIL", "error": str(e)}
            return _finish("partition", inputs, results, [results], conf, started, timing, EXIT_FAIL, "FAIL")
        ok = partition.count == w and partition.min_size >= target
        results = {
            "width": w,
            "chains": partition.count,
            "min_size": partition.min_size,
            "target": target,
            "sizes": sorted(partition.sizes, reverse=True),
            "verdict": "PASS" if ok else "FAIL",
        }
        rows = [{"chain": i, "size": len(c)} for i, c in enumerate(partition.chains)]
    elif mode == "grids":
        if d is None:
            raise PrecondError("--mode grids needs --d")
        partition = partition_into_grids(shape, d, threads=conf.threads)
        ok = partition.verify()
        results = {
            "d": d,
            "m": list(partition.m),
            "parts": len(partition.parts),
            "part_sides": sorted({part.sides for part in partition.parts}),
            "min_side": min(part.min_side for part in partition.parts),
            "verdict": "PASS" if ok else "FAIL",
        }
        rows = [{"part": i, "sides": list(part.sides), "size": part.size} for i, part in enumerate(partition.parts)]
    else:
        raise PrecondError(f"partition mode must be chains or grids, got {mode!r}")
    if partition_out:
        save_partition(partition, partition_out)
    code = EXIT_OK if ok else EXIT_FAIL
    return _finish("partition", inputs, results, rows, conf, started, timing, code, results["verdict"])


def cmd_extremal(shape: GridShape, structure: str = "copy", P: Optional[Poset] = None,
                 mode: str = "weak", d: Optional[int] = None, conf: Config = CONF,
                 timing: bool = False) -> CommandResult:
    started = time.monotonic()
    inputs: Dict[str, Any] = {"shape": list(shape.sides), "structure": structure}
    if structure == "copy":
        if P is None:
            raise PrecondError("--structure copy needs --poset")
        inputs.update(poset=poset_to_dict(P), mode=mode)
        res = max_avoiding(shape, P, CopyMode(mode), budget=conf.budget, threads=conf.threads)
    elif structure == "boolean":
        if d is None:
            raise PrecondError("--structure boolean needs --d")
        inputs["d"] = d
        res = max_no_boolean_algebra(shape, d, budget=conf.budget, threads=conf.threads)
    elif structure == "join":
        res = max_no_join(shape, budget=conf.budget, threads=conf.threads)
    else:
        raise PrecondError(f"unknown structure {structure!r}")
    results = _extremal_dict(res)
    row = {"shape": list(shape.sides), "structure": structure, "optimum": res.optimum,
           "status": res.status, "nodes": res.nodes}
    if not res.complete:
        logger.warning("budget of %d nodes exhausted; %d is a lower bound", conf.budget, res.optimum)
    code = EXIT_OK if res.complete else EXIT_BUDGET
    return _finish("extremal", inputs, results, [row], conf, started, timing, code, res.status.upper())


def cmd_detect(F: Family, structure: str, P: Optional[Poset] = None, mode: str = "weak",
               d: Optional[int] = None, h: Optional[int] = None, conf: Config = CONF,
               timing: bool = False) -> CommandResult:
    started = time.monotonic()
    inputs: Dict[str, Any] = {"family": {"shape": list(F.shape.sides), "points": [list(x) for x in F]},
                              "structure": structure}
    witness: Any = None
    if structure == "join":
        t = find_join_triple(F, budget=conf.budget)
        if t is not None:
            witness = {"u": list(t.u), "v": list(t.v), "w": list(t.w)}
    elif structure == "boolean":
        if d is None:
            raise PrecondError("--structure boolean needs --d")
        inputs["d"] = d
        b = find_boolean_algebra(F, d, budget=conf.budget)
        if b is not None:
            witness = {"v0": list(b.v0), "offsets": [list(v) for v in b.offsets],
                       "points": [list(x) for x in b.points()]}
    elif structure == "copy":
        if P is None:
            raise PrecondError("--structure copy needs --poset")
        inputs.update(poset=poset_to_dict(P), mode=mode)
        e = find_copy(F, P, CopyMode(mode), budget=conf.budget, threads=conf.threads)
        witness = None if e is None else embedding_to_dict(e)
    elif structure == "strong-chain":
        h = h if h is not None else (height(P) if P is not None else None)
        if h is None:
            raise PrecondError("--structure strong-chain needs --h or --poset")
        inputs["h"] = h
        e = extract_strong_chain(F, h)
        witness = None if e is None else embedding_to_dict(e)
    else:
        raise PrecondError(f"unknown structure {structure!r}")
    results = {"found": witness is not None, "witness": witness if witness is not None else "none"}
    return _finish("detect", inputs, results, [{"structure": structure, "found": witness is not None}],
                   conf, started, timing)


def cmd_constants(P: Poset, conf: Config = CONF, timing: bool = False) -> CommandResult:
    started = time.monotonic()
    consts = compute_constants(P)
    proxy = consts.exponent_proxy
    results = {
        "h": consts.h,
        "p": consts.p,
        "r": consts.r,
        "d0": consts.d0,
        "q": consts.q,
        "s": [f"2^{e}" for e in consts.s_exponents],
        "s_convention": "recurrence through s_h; s_h is the grid side k",
        "grid_side": f"2^{consts.grid_side_exponent}",
        "C": [render_big(c) for c in consts.C],
        "growth_ratio": render_big((1 + Fraction(8 * consts.h, consts.p)) ** consts.q),
        "growth_certificate": render_big(consts.growth_certificate()),
        "growth_within_bound": consts.growth_within_bound(),
        "exponent_proxy": proxy,
    }
    rows = [{"l": l, "C": render_big(c)} for l, c in enumerate(consts.C)]
    return _finish("constants", {"poset": poset_to_dict(P)}, results, rows, conf, started, timing)


def cmd_bounds(P: Poset, n: int, k: int, d: int = 2, conf: Config = CONF,
               timing: bool = False) -> CommandResult:
    started = time.monotonic()
    cat = bound_catalog(P, n, k, d)
    entries = [
        {"name": e.name, "formula": e.formula, "value": e.value, "exact": e.exact,
         "applicable": e.applicable, "note": e.note}
        for e in cat.entries
    ]
    results = {"n": n, "k": k, "d": d, "h": cat.h, "p": cat.p, "r": cat.r, "width": cat.width, "bounds": entries}
    return _finish("bounds", {"poset": poset_to_dict(P), "n": n, "k": k, "d": d}, results, entries,
                   conf, started, timing)


def cmd_verify_bounds(suite: SuiteFile, conf: Config = CONF, quiet: bool = False,
                      timing: bool = False) -> CommandResult:
    started = time.monotonic()
    rows = run_suite(suite, conf, quiet)
    failed = suite_failed(rows)
    counts = {s: sum(r["status"] == s for r in rows) for s in ("PASS", "FAIL", "INCOMPLETE")}
    results = {"suite": suite.name, "counts": counts, "rows": rows}
    verdict = "FAIL" if failed else "PASS"
    return _finish("verify-bounds", {"suite": suite.dict()}, results, rows, conf, started, timing,
                   EXIT_FAIL if failed else EXIT_OK, verdict)
