import math

import pytest

from src.cli.csv_io import format_cell, render_csv, write_csv_atomic
from src.spectral_core.errors import ConfigError


@pytest.mark.parametrize(
    "value, text",
    [
        (0.1, "0.10000000000000001"),
        (1.0, "1"),
        (-0.5, "-0.5"),
        (1e22, "1e+22"),
        (math.nan, "nan"),
        (math.inf, "inf"),
        (7, "7"),
        (True, "true"),
        ("pass", "pass"),
    ],
)
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_render_csv():
    text = render_csv(("check", "value"), [("a", 0.5), ("b,c", 1e-3)])
    assert text == 'check,value\na,0.5\n"b,c",0.001\n'


def test_row_width_is_checked():
    with pytest.raises(ValueError):
        render_csv(("a", "b"), [(1,)])


def test_atomic_write(tmp_path):
    path = write_csv_atomic(tmp_path / "nested" / "out.csv", ("t",), [(1.0,), (2.0,)])
    assert path.read_text(encoding="utf-8") == "t\n1\n2\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.csv"]


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    with pytest.raises(ConfigError, match="not writable"):
        write_csv_atomic(blocker / "out.csv", ("t",), [])
