import json

import pytest
from hypothesis import given, strategies as st

from dynamide.tables import format_value, read_table, write_json, write_table


def test_empty_rows_give_header_only(tmp_path):
    p = write_table([], ("omega", "value"), tmp_path / "t.csv")
    assert p.read_bytes() == b"omega,value\n"


def test_three_rows_four_lines(tmp_path):
    p = write_table([(1, 0.5), (2, 0.25), (3, 0.1)], ("i", "x"), tmp_path / "t.csv")
    data = p.read_bytes()
    assert data.count(b"\n") == 4 and b"\r" not in data
    assert data.splitlines()[3] == b"3,0.10000000000000001"


def test_byte_identical(tmp_path):
    rows = [(0.1, 2.0 / 3.0, -1e20), (float("inf"), 0.0, -0.0)]
    a = write_table(rows, "abc", tmp_path / "a.csv").read_bytes()
    b = write_table(rows, "abc", tmp_path / "b.csv").read_bytes()
    assert a == b


def test_width_mismatch(tmp_path):
    with pytest.raises(ValueError, match="row 1"):
        write_table([(1, 2), (1, 2, 3)], ("a", "b"), tmp_path / "t.csv")


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        write_table([], ("a",), blocker / "sub" / "t.csv")


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), max_size=20))
def test_round_trip_exact(tmp_path_factory, xs):
    p = write_table([(x,) for x in xs], ("x",), tmp_path_factory.mktemp("rt") / "t.csv")
    header, rows = read_table(p)
    assert header == ["x"] and [r[0] for r in rows] == xs


def test_format_value():
    assert format_value(True) == "true" and format_value(3) == "3" and format_value("s") == "s"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(float("nan")) == "nan"


def test_write_json_sorted(tmp_path):
    p = write_json({"b": 1, "a": {"d": 2, "c": 3}}, tmp_path / "r.json")
    text = p.read_text()
    assert text.index('"a"') < text.index('"b"') and text.index('"c"') < text.index('"d"')
    assert json.loads(text) == {"a": {"c": 3, "d": 2}, "b": 1}
