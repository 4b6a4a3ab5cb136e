"""
Performance Tests
"""
import time
from concurrent.futures import ThreadPoolExecutor, as_completed

import pytest

from main import main
from src.core.commands import cmd_verify_bounds
from src.decomposition.chains import partition_long_chains
from src.decomposition.width import grid_width
from src.detectors.copy_finder import CopyMode, find_copy
from src.grids.grid_core import Family, GridShape
from src.posets.poset_core import chain_poset, complete_multilevel
from src.utils.io_utils import load_suite


class TestPerformance:
    """Test runtimes of the core routines"""

    def test_width_of_large_grid(self):
        start_time = time.time()
        w = grid_width(GridShape.uniform(10, 6))
        end_time = time.time()

        assert w > 0
        assert (end_time - start_time) < 2.0

    def test_long_chain_partition(self):
        start_time = time.time()
        partition = partition_long_chains(GridShape.uniform(3, 5))
        end_time = time.time()

        assert partition.count == grid_width(GridShape.uniform(3, 5))
        assert (end_time - start_time) < 5.0

    def test_copy_in_full_cube(self):
        F = Family.full(GridShape.uniform(6, 3))

        start_time = time.time()
        e = find_copy(F, complete_multilevel([2, 2, 2]), CopyMode.STRONG, threads=2)
        end_time = time.time()

        assert e is not None
        assert (end_time - start_time) < 5.0

    def test_smoke_suite(self, suites_dir, conf):
        start_time = time.time()
        result = cmd_verify_bounds(load_suite(suites_dir / "smoke.json"), conf, quiet=True)
        end_time = time.time()

        assert result.exit_code == 0
        assert (end_time - start_time) < 30.0


class TestConcurrentRuns:
    """Test independent command runs side by side"""

    def test_concurrent_width_reports(self, tmp_path):
        outs = [tmp_path / f"w{i}.json" for i in range(6)]

        with ThreadPoolExecutor(max_workers=3) as executor:
            futures = [executor.submit(main, ["width", "--shape", "3,3,3", "--out", str(o), "--quiet"])
                       for o in outs]
            codes = [f.result() for f in as_completed(futures)]

        assert codes == [0] * 6
        assert len({o.read_bytes() for o in outs}) == 1


@pytest.mark.slow
class TestAcceptance:
    """Full acceptance sweep"""

    def test_acceptance_suite(self, suites_dir, conf):
        result = cmd_verify_bounds(load_suite(suites_dir / "acceptance.json"), conf, quiet=True)

        failed = [r for r in result.rows if r["status"] == "FAIL"]
        assert failed == []
        assert result.exit_code == 0

    def test_long_chain_search(self, conf):
        F = Family.full(GridShape.uniform(4, 4))

        assert find_copy(F, chain_poset(13), CopyMode.WEAK, budget=conf.budget) is not None
