import io
import json
import math

import pytest

from Wave.utils.report_writer import (
    emit_diagnostic,
    format_csv_value,
    format_diagnostic,
    render_csv,
    render_json,
    render_report,
    write_report,
)


class _TTY(io.StringIO):
    def isatty(self):
        return True


@pytest.mark.parametrize("value,text", [
    (1.0, "1.0000000000000000e+00"),
    (-0.1, "-1.0000000000000001e-01"),
    (math.nan, "nan"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
    (True, "true"),
    (None, ""),
    (3, "3"),
    ("pass", "pass"),
])
def test_format_csv_value(value, text):
    assert format_csv_value(value) == text


def test_render_csv_with_footer():
    text = render_csv(("a", "b"), [{"a": 1.0, "b": "x"}], {"k_lim": 1.0})
    assert text == "a,b\n1.0000000000000000e+00,x\n# k_lim,1.0000000000000000e+00\n"


def test_render_json_maps_non_finite_to_null():
    text = render_json({"limit": math.inf}, [{"x": math.nan, "y": 0.1}])
    document = json.loads(text)
    assert document["meta"]["limit"] is None
    assert document["rows"] == [{"x": None, "y": 0.1}]


def test_render_report_json_places_footer_in_meta():
    text = render_report("json", ("a",), [{"a": 2.0, "extra": 1}], {"command": "x"}, {"mu1": 0.5})
    document = json.loads(text)
    assert document["meta"]["limits"] == {"mu1": 0.5}
    assert document["rows"] == [{"a": 2.0}]


def test_write_report_creates_directories(tmp_path):
    target = tmp_path / "a" / "b" / "out.csv"
    write_report("x\n", str(target))
    assert target.read_bytes() == b"x\n"
    stream = io.StringIO()
    write_report("y\n", stream=stream)
    assert stream.getvalue() == "y\n"


def test_diagnostic_color(monkeypatch):
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert format_diagnostic("boom", "error", io.StringIO()) == "[error] boom"
    assert format_diagnostic("boom", "error", _TTY()).startswith("\033[31m")
    monkeypatch.setenv("NO_COLOR", "1")
    assert format_diagnostic("boom", "error", _TTY()) == "[error] boom"


def test_emit_diagnostic_writes_line():
    stream = io.StringIO()
    emit_diagnostic("careful", "warning", stream)
    assert stream.getvalue() == "[warning] careful\n"
