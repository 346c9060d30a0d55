import json

import pytest

from spinglass.reports import emit_svg, format_value, write_csv, write_json


ROWS = [
    {"x": 0.0, "y": 1.0, "z": 2.0},
    {"x": 0.5, "y": 0.25, "z": 1.5},
    {"x": 1.0, "y": 0.0, "z": 1.0},
]


class TestFormatValue:
    def test_booleans(self):
        assert format_value(True) == "true"
        assert format_value(False) == "false"

    def test_floats_round_trip(self):
        value = 0.1 + 0.2
        assert float(format_value(value)) == value
        assert float(format_value(1.0 / 3.0)) == 1.0 / 3.0

    def test_other_types_pass_through(self):
        assert format_value(3) == "3"
        assert format_value("EASY") == "EASY"


class TestWriteCsv:
    def test_layout(self, tmp_path):
        path = tmp_path / "out.csv"
        write_csv(path, ["x", "y"], ROWS, {"seed": 1, "flag": True})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# config: ")
        assert json.loads(lines[0].removeprefix("# config: ")) == {"seed": 1, "flag": True}
        assert lines[1] == "x,y"
        assert len(lines) == 2 + len(ROWS)
        assert lines[2] == "0,1"


class TestWriteJson:
    def test_document_shape(self, tmp_path):
        path = tmp_path / "out.json"
        write_json(path, ROWS, {"seed": 1}, extra={"summary": {"best": 0.5}})
        doc = json.loads(path.read_text())
        assert doc["config"] == {"seed": 1}
        assert len(doc["rows"]) == 3
        assert doc["summary"] == {"best": 0.5}


class TestEmitSvg:
    def test_one_polyline_per_series_plus_legend(self, tmp_path):
        path = tmp_path / "plot.svg"
        emit_svg(ROWS, "x", ["y", "z"], path)
        text = path.read_text()
        assert text.startswith("<svg")
        assert text.count("<polyline") == 2
        assert text.count("stroke-width=\"2\"") == 2  # legend swatches
        assert ">y</text>" in text and ">z</text>" in text
        assert ">x</text>" in text  # axis label

    def test_empty_rows_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="empty"):
            emit_svg([], "x", ["y"], tmp_path / "plot.svg")

    def test_unknown_column_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unknown column"):
            emit_svg(ROWS, "x", ["nope"], tmp_path / "plot.svg")

    def test_constant_series_does_not_divide_by_zero(self, tmp_path):
        rows = [{"x": 0.0, "y": 1.0}, {"x": 0.0, "y": 1.0}]
        emit_svg(rows, "x", ["y"], tmp_path / "flat.svg")
        assert (tmp_path / "flat.svg").exists()
