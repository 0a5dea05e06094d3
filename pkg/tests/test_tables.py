import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given, strategies as st

from weakmeas.tables import format_csv, read_csv, write_csv, write_histogram_svg


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=20))
def test_floats_round_trip_exactly(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    write_csv(path, ["v"], [[v] for v in values], {"n": len(values)})
    meta, header, data = read_csv(path)
    assert header == ["v"] and meta == {"n": str(len(values))}
    assert data[:, 0].tolist() == values


def test_format_is_stable():
    text = format_csv(["a", "b"], [[0.1, 2], [np.float64(1 / 3), -1]], {"seed": 7})
    assert text == "# seed: 7\na,b\n0.10000000000000001,2\n0.33333333333333331,-1\n"


def test_write_leaves_no_temporaries(tmp_path):
    write_csv(tmp_path / "sub" / "x.csv", ["a"], [[1.0]])
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["x.csv"]


def test_svg_is_well_formed(tmp_path):
    edges = np.linspace(-1, 1, 11)
    path = write_histogram_svg(tmp_path / "h.svg", edges, {"a": np.arange(10.0)}, {"c": np.ones(10)}, "t < 1 & ok")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
