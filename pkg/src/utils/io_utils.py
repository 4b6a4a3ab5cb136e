"""
Reading and writing posets, families, partitions, embeddings and suites.

JSON files are validated by the pydantic schemas. Families may also be
stored in the binary format: n as uint64 LE, the n sides as uint64 LE, then
ceil(N/8) bytes of bitset with bit i the point of mixed-radix rank i.
"""
import json
import os
from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from src.api.schemas import (
    ChainPartitionFile, EmbeddingFile, FamilyFile, GridPartitionFile, PosetFile, SuiteFile,
)
from src.core.errors import InputError
from src.decomposition.chains import ChainPartition
from src.decomposition.grids import GridPartition
from src.detectors.copy_finder import CopyMode, Embedding
from src.grids.grid_core import Family, GridShape
from src.posets.poset_core import (
    Poset, antichain_poset, boolean_lattice, chain_poset, complete_multilevel, poset_from_relations,
)

PathLike = Union[str, "os.PathLike[str]"]
HEADER = np.dtype("<u8")


def parse_shape(text: str) -> GridShape:
    """'2,2,2' -> [2]^3."""
    try:
        sides = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise InputError(f"shape must be comma-separated integers, got {text!r}") from None
    if not sides:
        raise InputError("shape must name at least one side")
    return GridShape(sides)


def _int_list(text: str, what: str):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"bad {what} in {text!r}") from None


def _read_json(path: PathLike) -> Any:
    if not os.path.exists(path):
        raise InputError(f"file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path} is not valid JSON: {e}") from None


def _validated(model, raw: Any, path: PathLike) -> BaseModel:
    try:
        return model(**raw) if isinstance(raw, dict) else model.parse_obj(raw)
    except ValidationError as e:
        raise InputError(f"{path}: {e}") from None


def _write_json(obj: Any, path: PathLike):
    folder = os.path.dirname(os.fspath(path))
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


# ==================== Posets ====================

def poset_from_shorthand(source: str) -> Optional[Poset]:
    """chain:N, antichain:N, K:r1,r2,.. or bool:N; None for anything else."""
    kind, sep, arg = source.partition(":")
    if not sep or kind not in ("chain", "antichain", "K", "bool"):
        return None
    if kind == "K":
        return complete_multilevel(_int_list(arg, "level sizes"))
    n = _int_list(arg, "size")
    if len(n) != 1:
        raise InputError(f"{kind}: takes one integer, got {arg!r}")
    return {"chain": chain_poset, "antichain": antichain_poset, "bool": boolean_lattice}[kind](n[0])


def load_poset(source: PathLike) -> Poset:
    shorthand = poset_from_shorthand(os.fspath(source))
    if shorthand is not None:
        return shorthand
    data = _validated(PosetFile, _read_json(source), source)
    return poset_from_relations(data.elements, data.relations)


def poset_to_dict(P: Poset) -> Dict[str, Any]:
    return {"elements": list(P.labels), "relations": [list(pair) for pair in P.comparable_pairs()]}


# ==================== Families ====================

def family_to_dict(F: Family) -> Dict[str, Any]:
    return {"shape": list(F.shape.sides), "points": [list(x) for x in F]}


def family_from_dict(raw: Any, source: PathLike = "<family>") -> Family:
    data = _validated(FamilyFile, raw, source)
    return Family.from_points(GridShape(tuple(data.shape)), data.points)


def family_to_bytes(F: Family) -> bytes:
    header = np.array((F.shape.n,) + F.shape.sides, dtype=HEADER).tobytes()
    return header + F.bits.to_bytes(-(-F.shape.size // 8), "little")


def family_from_bytes(blob: bytes) -> Family:
    if len(blob) < HEADER.itemsize:
        raise InputError("binary family is shorter than its header")
    n = int(np.frombuffer(blob[:8], dtype=HEADER)[0])
    end = 8 * (n + 1)
    if len(blob) < end:
        raise InputError(f"binary family header declares {n} sides but is truncated")
    shape = GridShape(tuple(int(k) for k in np.frombuffer(blob[8:end], dtype=HEADER)))
    body = blob[end:]
    if len(body) != -(-shape.size // 8):
        raise InputError(f"bitset has {len(body)} bytes, shape {shape.sides} needs {-(-shape.size // 8)}")
    return Family(shape, int.from_bytes(body, "little"))


def load_family(path: PathLike) -> Family:
    if os.fspath(path).endswith(".bin"):
        if not os.path.exists(path):
            raise InputError(f"file not found: {path}")
        with open(path, "rb") as f:
            return family_from_bytes(f.read())
    return family_from_dict(_read_json(path), path)


def save_family(F: Family, path: PathLike):
    if os.fspath(path).endswith(".bin"):
        with open(path, "wb") as f:
            f.write(family_to_bytes(F))
    else:
        _write_json(family_to_dict(F), path)


# ==================== Partitions and embeddings ====================

def chain_partition_to_dict(partition: ChainPartition) -> Dict[str, Any]:
    data = ChainPartitionFile(
        shape=list(partition.shape.sides),
        chains=[[list(x) for x in chain] for chain in partition.chains],
    )
    return data.dict()


def grid_partition_to_dict(partition: GridPartition) -> Dict[str, Any]:
    data = GridPartitionFile(
        shape=list(partition.shape.sides),
        d=partition.d,
        m=list(partition.m),
        parts=[[[list(x) for x in chain] for chain in part.chains] for part in partition.parts],
    )
    return data.dict()


def save_partition(partition: Union[ChainPartition, GridPartition], path: PathLike):
    if isinstance(partition, GridPartition):
        _write_json(grid_partition_to_dict(partition), path)
    else:
        _write_json(chain_partition_to_dict(partition), path)


def embedding_to_dict(e: Embedding) -> Dict[str, Any]:
    return {"mode": e.mode.value, "mapping": {label: list(x) for label, x in e.mapping}}


def load_embedding(path: PathLike) -> Embedding:
    data = _validated(EmbeddingFile, _read_json(path), path)
    return Embedding.from_dict(CopyMode(data.mode), data.mapping)


# ==================== Suites ====================

def load_suite(path: PathLike) -> SuiteFile:
    return _validated(SuiteFile, _read_json(path), path)
