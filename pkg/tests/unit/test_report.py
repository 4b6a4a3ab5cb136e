"""
Unit Tests for Canonical Reports
"""
import json
from enum import Enum
from fractions import Fraction

import numpy as np
import pytest

from src.core.config import CONF, VERSION
from src.core.report import (
    build_report, canonical_json, csv_text, input_hash, provenance, to_plain, write_csv_rows, write_json_report,
)


class Color(str, Enum):
    RED = "red"


class TestToPlain:
    """Test conversion of values JSON cannot carry canonically"""

    def test_fractions(self):
        assert to_plain(Fraction(3, 4)) == "3/4"
        assert to_plain(Fraction(8, 4)) == 2

    def test_floats_fixed(self):
        assert to_plain(1 / 3) == "0.333333"

    def test_nested(self):
        assert to_plain({"a": (1, Fraction(1, 2)), 2: [Color.RED, None, True]}) == {
            "a": [1, "1/2"],
            "2": ["red", None, True],
        }

    def test_numpy_scalars(self):
        assert to_plain(np.int64(7)) == 7
        assert to_plain(np.bool_(True)) is True

    def test_unserializable(self):
        with pytest.raises(TypeError):
            to_plain(object())


class TestCanonicalJson:
    def test_sorted_with_trailing_newline(self):
        text = canonical_json({"b": 1, "a": 2})

        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')

    def test_hash_ignores_key_order(self):
        assert input_hash({"a": 1, "b": 2}) == input_hash({"b": 2, "a": 1})
        assert len(input_hash({})) == 64


class TestBuildReport:
    """Test report bodies"""

    def test_fields(self):
        report = build_report("width", {"shape": [2, 2]}, {"exact": 2})

        assert report["command"] == "width"
        assert report["results"] == {"exact": 2}
        assert report["provenance"] == provenance(CONF)
        assert report["provenance"]["version"] == VERSION
        assert "wall_time" not in report

    def test_wall_time_when_requested(self):
        report = build_report("width", {}, {}, wall_time=0.5)

        assert report["wall_time"] == "0.500000"

    def test_byte_identical(self):
        a = canonical_json(build_report("width", {"shape": [3, 3]}, {"exact": 3, "r": Fraction(1, 3)}))
        b = canonical_json(build_report("width", {"shape": [3, 3]}, {"r": Fraction(1, 3), "exact": 3}))

        assert a == b


class TestWriters:
    def test_json_to_file(self, tmp_path):
        path = tmp_path / "reports" / "r.json"
        write_json_report({"x": Fraction(1, 2)}, str(path))

        assert json.loads(path.read_text()) == {"x": "1/2"}

    def test_json_to_stdout(self, capsys):
        write_json_report({"x": 1})

        assert json.loads(capsys.readouterr().out) == {"x": 1}

    def test_csv(self):
        text = csv_text([{"check": "width", "params": {"shape": [2, 2]}, "status": "PASS"},
                         {"check": "width", "extra": 1}])

        lines = text.splitlines()
        assert lines[0] == "check,params,status,extra"
        assert lines[1] == 'width,"{""shape"":[2,2]}",PASS,'
        assert lines[2] == "width,,,1"

    def test_csv_file(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_csv_rows([{"a": Fraction(1, 3)}], str(path))

        assert path.read_text() == "a\n1/3\n"
