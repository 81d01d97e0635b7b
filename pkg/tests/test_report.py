"""报告生成与写出"""

import csv
import io

import pytest

from otcoh.models import OutputFormat, Report
from otcoh.report import ReportWriter, build_report
from otcoh.utils import calculate_text_hash
from otcoh.verifier import OTVerifier

INPUT_HASH = calculate_text_hash("cubic")


@pytest.fixture(scope="module")
def cubic_report(cubic_classes):
    entries = OTVerifier(cubic_classes, symbolic=False).verify()
    return build_report(cubic_classes, INPUT_HASH, 256, 1e-9, verification=entries)


class TestBuildReport:
    """报告内容"""

    def test_classes(self, cubic_report):
        assert len(cubic_report.classes) == 7
        trivial = cubic_report.get_class("trivial")
        assert trivial.trivial
        assert trivial.hodge == [[1, 1, 0], [0, 0, 0], [0, 1, 1]]
        assert trivial.members == ["(∅,∅,∅)", "({1},{1},{1})"]
        assert trivial.inverse == "trivial"
        assert trivial.euler_characteristic == 0

    def test_tangent_summary(self, cubic_report):
        assert cubic_report.tangent.rigid
        assert cubic_report.tangent.h01_classes == ["trivial", "(∅,∅,{1})"]
        assert cubic_report.tangent.cotangent == cubic_report.get_class("trivial").hodge

    def test_provenance(self, cubic_report):
        provenance = cubic_report.provenance
        assert provenance.input_hash == INPUT_HASH
        assert provenance.backend == "numeric"
        assert provenance.precision == 256

    def test_passed(self, cubic_report):
        assert cubic_report.passed
        assert cubic_report.get_class("missing") is None


class TestRender:
    """渲染格式"""

    def test_json_round_trip(self, cubic_report):
        text = ReportWriter(OutputFormat.JSON).render(cubic_report)
        assert Report.model_validate_json(text) == cubic_report

    def test_deterministic(self, cubic_classes, cubic_report):
        again = build_report(
            cubic_classes,
            INPUT_HASH,
            256,
            1e-9,
            verification=cubic_report.verification,
        )
        writer = ReportWriter(OutputFormat.JSON)
        assert writer.render(again) == writer.render(cubic_report)

    def test_csv(self, cubic_report):
        text = ReportWriter(OutputFormat.CSV).render(cubic_report)
        rows = list(csv.DictReader(io.StringIO(text)))
        hodge = [r for r in rows if r["kind"] == "hodge" and r["class"] == "trivial"]
        assert len(hodge) == 9
        assert {(r["p"], r["q"], r["dim"]) for r in hodge if r["dim"] != "0"} == {
            ("0", "0", "1"),
            ("0", "1", "1"),
            ("2", "1", "1"),
            ("2", "2", "1"),
        }
        assert any(r["kind"].startswith("check:") for r in rows)

    def test_markdown(self, cubic_report):
        text = ReportWriter(OutputFormat.MD).render(cubic_report)
        assert "## trivial" in text
        assert "| p \\ q | 0 | 1 | 2 |" in text
        assert "| 2 | 0 | 1 | 1 |" in text


class TestWrite:
    """原子写入"""

    def test_write_to_directory(self, cubic_report, tmp_path):
        target = ReportWriter(OutputFormat.MD).write(cubic_report, tmp_path)
        assert target == tmp_path / f"{INPUT_HASH[:16]}.md"
        assert target.read_text(encoding="utf-8").startswith("# ")
        assert [p.name for p in tmp_path.iterdir()] == [target.name]

    def test_write_to_file(self, cubic_report, tmp_path):
        out = tmp_path / "nested" / "report.json"
        target = ReportWriter().write(cubic_report, out)
        assert target == out
        assert Report.model_validate_json(out.read_text(encoding="utf-8")).provenance.input_hash == INPUT_HASH

    def test_failed_render_leaves_nothing(self, cubic_report, tmp_path, monkeypatch):
        writer = ReportWriter()

        def broken(report):
            raise RuntimeError("render failed")

        monkeypatch.setattr(writer, "render", broken)
        with pytest.raises(RuntimeError):
            writer.write(cubic_report, tmp_path)
        assert list(tmp_path.iterdir()) == []
