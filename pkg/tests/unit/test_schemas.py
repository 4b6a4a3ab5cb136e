"""
Unit Tests for File and Report Schemas
"""
import pytest
from pydantic import ValidationError

from src.api.schemas import (
    CHECK_IDS, CheckRow, EmbeddingFile, FamilyFile, PosetFile, ReportModel, SuiteCheck, SuiteFile,
)


class TestPosetFile:
    """Test PosetFile validation"""

    def test_valid(self):
        data = PosetFile(elements=["a", "b"], relations=[["a", "b"]])

        assert data.elements == ["a", "b"]

    def test_relations_default_empty(self):
        assert PosetFile(elements=["a"]).relations == []

    def test_duplicate_labels(self):
        with pytest.raises(ValidationError):
            PosetFile(elements=["a", "a"], relations=[])

    def test_unknown_element(self):
        with pytest.raises(ValidationError) as exc_info:
            PosetFile(elements=["a", "b"], relations=[["a", "z"]])

        assert "unknown" in str(exc_info.value)

    def test_relation_arity(self):
        with pytest.raises(ValidationError):
            PosetFile(elements=["a", "b", "c"], relations=[["a", "b", "c"]])


class TestFamilyFile:
    """Test FamilyFile validation"""

    def test_valid(self):
        data = FamilyFile(shape=[2, 3], points=[[1, 3], [2, 1]])

        assert len(data.points) == 2

    def test_point_outside_grid(self):
        with pytest.raises(ValidationError):
            FamilyFile(shape=[2, 2], points=[[3, 1]])

    def test_point_wrong_dimension(self):
        with pytest.raises(ValidationError):
            FamilyFile(shape=[2, 2], points=[[1]])

    def test_non_positive_side(self):
        with pytest.raises(ValidationError):
            FamilyFile(shape=[0, 2], points=[])

    def test_empty_shape(self):
        with pytest.raises(ValidationError):
            FamilyFile(shape=[], points=[])


class TestEmbeddingFile:
    def test_mode(self):
        assert EmbeddingFile(mode="strong", mapping={"a": [1, 1]}).mode == "strong"
        with pytest.raises(ValidationError):
            EmbeddingFile(mode="loose", mapping={})


class TestSuiteFile:
    """Test verify-bounds suite validation"""

    def test_defaults(self):
        suite = SuiteFile(checks=[SuiteCheck(check="sperner")])

        assert suite.name == "suite"
        assert suite.seed is None
        assert suite.checks[0].params == {}
        assert not suite.checks[0].golden

    def test_every_check_id_accepted(self):
        suite = SuiteFile(checks=[{"check": c} for c in CHECK_IDS])

        assert len(suite.checks) == 16

    def test_unknown_check(self):
        with pytest.raises(ValidationError):
            SuiteCheck(check="collatz")

    def test_duplicate_names(self):
        with pytest.raises(ValidationError):
            SuiteFile(checks=[{"check": "sperner", "name": "x"}, {"check": "width", "name": "x"}])

    def test_after_default_names(self):
        suite = SuiteFile(checks=[{"check": "sperner"}, {"check": "width", "after": ["sperner#0"]}])

        assert suite.checks[1].after == ["sperner#0"]

    def test_after_unknown(self):
        with pytest.raises(ValidationError):
            SuiteFile(checks=[{"check": "width", "after": ["missing"]}])


class TestReportSchemas:
    def test_check_row_status(self):
        assert CheckRow(check="width", params={}, status="PASS").bound is None
        with pytest.raises(ValidationError):
            CheckRow(check="width", params={}, status="MAYBE")

    def test_report_hash_length(self):
        with pytest.raises(ValidationError):
            ReportModel(command="width", inputs={}, input_hash="abc", results={}, provenance={})

    def test_report_defaults(self):
        report = ReportModel(command="width", inputs={}, input_hash="0" * 64, results={}, provenance={})

        assert report.status == "OK"
        assert report.wall_time is None
