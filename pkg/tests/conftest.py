"""
Pytest Configuration and Fixtures
"""
import os
import random
import sys
import tempfile
from pathlib import Path

import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

# Keep test logs out of the project tree; must be set before src is imported
os.environ.setdefault("PGL_LOG_DIR", tempfile.mkdtemp(prefix="posetgrid-logs-"))
os.environ.setdefault("PGL_THREADS", "2")

from src.core.config import CONF  # noqa: E402
from src.posets.poset_core import chain_poset, poset_from_relations  # noqa: E402


# ==================== Fixtures ====================

@pytest.fixture
def conf():
    """Small deterministic configuration"""
    return CONF.with_overrides(budget=2_000_000, threads=2, seed=7)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def chain2():
    return chain_poset(2)


@pytest.fixture
def chain3():
    return chain_poset(3)


@pytest.fixture
def v_poset():
    """a < b, a < c"""
    return poset_from_relations(["a", "b", "c"], [["a", "b"], ["a", "c"]])


@pytest.fixture
def diamond():
    """Boolean lattice 2^[2] with labels 0 < x, y < 1"""
    return poset_from_relations(
        ["0", "x", "y", "1"],
        [["0", "x"], ["0", "y"], ["x", "1"], ["y", "1"]],
    )


@pytest.fixture
def posets_dir():
    return Path(__file__).parent.parent / "posets"


@pytest.fixture
def suites_dir():
    return Path(__file__).parent.parent / "suites"
