import io
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from poisson_newton.divisor import Divisor, Rectangle
from poisson_newton.errors import FormatError, SeriesSpecError
from poisson_newton.io import (SelbergInstance, divisor_from_dict, divisor_to_dict, dump_selberg, dump_series,
                               load_selberg, load_series, read_divisor_csv, series_from_dict, write_atoms_csv,
                               write_divisor_csv)
from poisson_newton.series import DirichletSeries, atom_measure


def test_series_round_trip(tmp_path):
    s = DirichletSeries((1.0, math.sqrt(2)), (0.5 - 0.1j, 0.25))
    dump_series(s, tmp_path / "s.json")
    assert load_series(tmp_path / "s.json") == s
    lat = DirichletSeries.lattice(0.5, (1, 3), (2.0, -1.0))
    dump_series(lat, tmp_path / "l.json")
    assert load_series(tmp_path / "l.json") == lat


def test_series_plain_number_coefficients():
    s = series_from_dict({"frequencies": [1, 2], "coefficients": [3, [1, 0]]})
    assert s.coefficients == (3 + 0j, 1 + 0j)


@pytest.mark.parametrize("data,field", [
    ({"coefficients": [1]}, "frequencies"),
    ({"frequencies": [1]}, "coefficients"),
    ({"frequencies": [1, "x"], "coefficients": [1, 1]}, r"frequencies\[1\]"),
    ({"frequencies": [1], "coefficients": [[1, 2, 3]]}, r"coefficients\[0\]"),
    ({"frequencies": [1], "coefficients": [1], "rational_base": "a"}, "rational_base"),
    ({"frequencies": [1], "coefficients": [1], "rational_base": 1, "multipliers": [1.5]}, "multipliers"),
    ({"frequencies": [2, 1], "coefficients": [1, 1]}, "frequencies"),
])
def test_series_errors_name_field(data, field):
    with pytest.raises(SeriesSpecError, match=field):
        series_from_dict(data)


def test_invalid_json_is_format_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ nope")
    with pytest.raises(FormatError, match="line 1"):
        load_series(p)


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(finite, finite, st.integers(-3, 3).filter(bool)), max_size=20))
def test_divisor_csv_round_trip_exact(raw):
    d = Divisor.from_points([(complex(x, y), m) for x, y, m in raw], Rectangle(-2, 2, -5, 5))
    buf = io.StringIO()
    write_divisor_csv(d, buf)
    buf.seek(0)
    back = read_divisor_csv(buf, d.window)
    assert back.points == d.points


def test_divisor_json_round_trip():
    d = Divisor.from_points([(0.1 + 2j, 1), (0.1 - 2j, 1), (-1.0, -2)], Rectangle(-2, 1, -3, 3))
    back = divisor_from_dict(json.loads(json.dumps(divisor_to_dict(d))))
    assert back.points == d.points and back.window == d.window


def test_divisor_csv_errors():
    with pytest.raises(FormatError, match="line 1"):
        read_divisor_csv(io.StringIO("a,b\n"))
    with pytest.raises(FormatError, match="line 3"):
        read_divisor_csv(io.StringIO("re,im,mult\n0,1,1\n0,x,1\n"))


def test_atoms_csv():
    buf = io.StringIO()
    write_atoms_csv(atom_measure(DirichletSeries((1.0,), (-1.0,)), 2.5), buf)
    assert buf.getvalue().splitlines() == ["frequency,weight_re,weight_im", "1.0,1.0,0.0", "2.0,1.0,0.0"]


def test_selberg_round_trip(tmp_path):
    inst = SelbergInstance(2, (1.5, 2.7), (2.3,))
    dump_selberg(inst, tmp_path / "x.json")
    assert load_selberg(tmp_path / "x.json") == inst
    (tmp_path / "bad.json").write_text(json.dumps({"genus": 1, "eigen_gammas": [], "lengths": []}))
    with pytest.raises(FormatError, match="genus"):
        load_selberg(tmp_path / "bad.json")
