"""
File Schemas
Posets, families, partitions, embeddings, verify-bounds suites and reports
"""
from pydantic import BaseModel, Field, validator
from typing import Any, Dict, List, Optional


CHECK_IDS = (
    "sperner", "erdos", "strong_chain", "strong_multilevel", "long_chains", "grid_partition",
    "join2d", "boolean", "intersection", "interpolation", "extraction", "fat_blocks",
    "oracle", "constants", "width", "strong_chain_peel",
)


def _check_shape(v: List[int]) -> List[int]:
    if any(k < 1 for k in v):
        raise ValueError("grid sides must be positive")
    return v


# ==================== Input Schemas ====================

class PosetFile(BaseModel):
    """Poset as labelled elements and generating relations a < b"""
    elements: List[str] = Field(..., description="Distinct element labels")
    relations: List[List[str]] = Field(default_factory=list, description="Pairs [a, b] meaning a < b")

    @validator("elements")
    def validate_elements(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("element labels must be distinct")
        return v

    @validator("relations")
    def validate_relations(cls, v, values):
        known = set(values.get("elements") or [])
        for pair in v:
            if len(pair) != 2:
                raise ValueError(f"relation {pair} must have exactly two labels")
            missing = [x for x in pair if x not in known]
            if missing:
                raise ValueError(f"relation {pair} names unknown elements {missing}")
        return v


class FamilyFile(BaseModel):
    """Family of points in a grid, 1-indexed coordinates"""
    shape: List[int] = Field(..., min_items=1)
    points: List[List[int]] = Field(default_factory=list)

    _shape = validator("shape", allow_reuse=True)(_check_shape)

    @validator("points")
    def validate_points(cls, v, values):
        shape = values.get("shape")
        if shape is None:
            return v
        for x in v:
            if len(x) != len(shape) or not all(1 <= c <= k for c, k in zip(x, shape)):
                raise ValueError(f"point {x} is outside the grid {shape}")
        return v


class ChainPartitionFile(BaseModel):
    shape: List[int]
    chains: List[List[List[int]]]

    _shape = validator("shape", allow_reuse=True)(_check_shape)


class GridPartitionFile(BaseModel):
    """Parts G_i = C_i1 x ... x C_id, each given by its d chains"""
    shape: List[int]
    d: int = Field(..., ge=1)
    m: List[int]
    parts: List[List[List[List[int]]]]

    _shape = validator("shape", allow_reuse=True)(_check_shape)


class EmbeddingFile(BaseModel):
    mode: str
    mapping: Dict[str, List[int]]

    @validator("mode")
    def validate_mode(cls, v):
        if v not in ("weak", "induced", "strong"):
            raise ValueError("mode must be weak, induced or strong")
        return v


class SuiteCheck(BaseModel):
    """One verify-bounds check and its parameter grid"""
    check: str
    name: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    golden: bool = False
    after: List[str] = Field(default_factory=list, description="Checks that must run first")

    @validator("check")
    def validate_check(cls, v):
        if v not in CHECK_IDS:
            raise ValueError(f"unknown check {v!r}; known checks: {', '.join(CHECK_IDS)}")
        return v


class SuiteFile(BaseModel):
    name: str = "suite"
    seed: Optional[int] = None
    checks: List[SuiteCheck] = Field(default_factory=list)

    @validator("checks")
    def validate_names(cls, v):
        names = [c.name or f"{c.check}#{i}" for i, c in enumerate(v)]
        if len(set(names)) != len(names):
            raise ValueError("check names must be unique")
        for c in v:
            unknown = [a for a in c.after if a not in names]
            if unknown:
                raise ValueError(f"check {c.name or c.check} runs after unknown checks {unknown}")
        return v


# ==================== Report Schemas ====================

class CheckRow(BaseModel):
    check: str
    params: Dict[str, Any]
    bound: Any = None
    measured: Any = None
    status: str

    @validator("status")
    def validate_status(cls, v):
        if v not in ("PASS", "FAIL", "INCOMPLETE"):
            raise ValueError("status must be PASS, FAIL or INCOMPLETE")
        return v


class ReportModel(BaseModel):
    """Body of every command report; no timestamps so reruns are byte-identical"""
    command: str
    inputs: Dict[str, Any]
    input_hash: str = Field(..., min_length=64, max_length=64)
    results: Dict[str, Any]
    provenance: Dict[str, Any]
    status: str = "OK"
    wall_time: Optional[str] = None
