import io

import numpy as np
import pytest

from srvreg.errors import CurveError
from srvreg.io import (
    parse_curve_csv, read_curve_csv, read_grid_binary, write_curve_csv, write_grid_binary, write_grid_csv,
)
from srvreg.problems import constant_problem
from srvreg.solver import SchemeConfig, solve


def test_parse_plain_and_header():
    c = parse_curve_csv("# my curve\nx,y\n0,0\n1,0\n\n1,1\n")
    np.testing.assert_array_equal(c.points, [[0, 0], [1, 0], [1, 1]])


def test_parse_param_column():
    c = parse_curve_csv("t,x,y\n0,0,0\n0.2,1,0\n1,1,1\n", param_column=True)
    np.testing.assert_array_equal(c.params, [0, 0.2, 1])
    with pytest.raises(CurveError, match="params"):
        parse_curve_csv("0,0,0\n0.5,1,0\n0.4,1,1\n1,2,2\n", param_column=True)


@pytest.mark.parametrize("text, where", [
    ("0,0\n1,zz\n", ":2:"),
    ("0,0\n1,0,3\n", ":2:"),
    ("0,0\n1,nan\n", ":2:"),
    ("0,0\n", "at least two"),
    ("", "no curve points"),
])
def test_parse_errors(text, where):
    with pytest.raises(CurveError, match=where):
        parse_curve_csv(text, "f.csv")


def test_read_missing(tmp_path):
    with pytest.raises(CurveError):
        read_curve_csv(str(tmp_path / "none.csv"))


def test_curve_round_trip(tmp_path):
    c = parse_curve_csv("0,0\n0.3,0.1\n1,1\n")
    p = tmp_path / "c.csv"
    with open(p, "w") as fh:
        write_curve_csv(c, fh)
    np.testing.assert_array_equal(read_curve_csv(str(p)).points, c.points)


def test_grid_dumps(tmp_path):
    value, policy = solve(constant_problem(), 6, SchemeConfig("U1"))
    buf = io.StringIO()
    write_grid_csv(value, policy, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "i,j,u,alpha1,alpha2" and len(lines) == 1 + 49
    p = str(tmp_path / "u.bin")
    write_grid_binary(value, p)
    raw = open(p, "rb").read()
    assert raw[:8] == b"SRVUGRID" and len(raw) == 16 + 8 * 49
    np.testing.assert_array_equal(read_grid_binary(p), value.u)
