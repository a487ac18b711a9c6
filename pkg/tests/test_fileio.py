import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from spheremean.config import Manifest
from spheremean.errors import DimensionError, InputError
from spheremean.fileio import (
    fmt,
    make_json_safe,
    phantom_from_dict,
    read_data,
    read_json,
    read_phantom,
    sidecar_path,
    write_csv,
    write_data,
    write_json,
    write_mode_dumps,
    write_phantom,
    write_profile_plot_data,
    write_residual_plot_data,
)
from spheremean.harmonics import sphere_grid
from spheremean.rangecond import orthogonality_residuals
from spheremean.transform import BoundaryData, demo_phantom, t_grid


@pytest.fixture
def small_data():
    grid, t = sphere_grid(2, 8), t_grid(2.0, 21)
    rng = np.random.default_rng(0)
    return BoundaryData(grid, t, rng.standard_normal((grid.size, t.size)), {"source": "test"})


def _read_rows(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(np.float64(1.0) / 3.0) == "0.333333333333333"


def test_make_json_safe():
    data = {
        "a": np.float64(1.5),
        "b": np.arange(3),
        "c": (np.int64(2), np.bool_(True)),
        "d": Fraction(-1, 2),
        "e": Path("out") / "report.json",
        1: None,
    }
    safe = make_json_safe(data)
    assert safe == {
        "a": 1.5,
        "b": [0, 1, 2],
        "c": [2, True],
        "d": "-1/2",
        "e": str(Path("out") / "report.json"),
        "1": None,
    }
    json.dumps(safe)


def test_json(tmp_path):
    path = write_json({"value": np.float64(2.0)}, tmp_path / "sub" / "report.json")
    data = read_json(path)
    assert data == {"schema": 1, "value": 2.0}


def test_json_manifest(tmp_path):
    manifest = Manifest("forward", {"seed": 0})
    data = read_json(write_json({}, tmp_path / "report.json", manifest))
    assert data["manifest"]["command"] == "forward"


@pytest.mark.parametrize(("content", "where"), [("{\n\n oops", ":3"), ("[]", "report.json")])
def test_read_json_errors(tmp_path, content, where):
    path = tmp_path / "report.json"
    path.write_text(content)
    with pytest.raises(InputError) as err:
        read_json(path)
    assert str(err.value.where).endswith(where)


def test_read_json_missing(tmp_path):
    with pytest.raises(InputError):
        read_json(tmp_path / "missing.json")


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "table.csv", ("i", "x"), [(1, 0.5), (2, np.float64(1e-20))])
    assert _read_rows(path) == [["i", "x"], ["1", "0.5"], ["2", "1e-20"]]


def test_phantom_file(tmp_path):
    ph = demo_phantom(3)
    other = read_phantom(write_phantom(ph, tmp_path / "phantom.json"))
    assert other.to_dict() == ph.to_dict()


@pytest.mark.parametrize(
    ("data", "where"),
    [
        ({}, "dimension"),
        ({"dimension": "two"}, "dimension"),
        ({"dimension": 2, "terms": {}}, "terms"),
        ({"dimension": 2, "terms": [{"m": 0}]}, "terms[0]"),
        (
            {"dimension": 2, "terms": [{"m": 0, "k": 1, "profile": {"kind": "box", "a": 0, "b": 1}}]},
            "terms[0]",
        ),
        (
            {"dimension": 2, "terms": [{"m": 1, "k": 3, "profile": {"kind": "annular-bump", "a": 0, "b": 1}}]},
            "terms",
        ),
    ],
)
def test_phantom_errors(data, where):
    with pytest.raises(InputError) as err:
        phantom_from_dict(data)
    assert err.value.where == where


def test_phantom_dimension():
    with pytest.raises(DimensionError):
        phantom_from_dict({"dimension": 4, "terms": []})


def test_data_file(tmp_path, small_data):
    path = write_data(small_data, tmp_path / "data.csv", Manifest("forward", {}))
    rows = _read_rows(path)
    assert rows[0] == ["center_index", "t", "value"]
    assert len(rows) == 1 + small_data.values.size
    assert rows[1][:2] == ["0", "0"] and rows[2][:2] == ["0", "0.1"]
    sidecar = read_json(sidecar_path(path))
    assert sidecar["schema"] == 1 and sidecar["t"] == {"t_max": 2.0, "samples": 21}
    assert sidecar["manifest"]["command"] == "forward"

    other = read_data(path)
    assert np.allclose(other.values, small_data.values, rtol=1e-14, atol=0.0)
    assert other.metadata == {"source": "test"}


def _rewrite(path, edit):
    lines = path.read_text().splitlines()
    edit(lines)
    path.write_text("\n".join(lines) + "\n")


@pytest.mark.parametrize(
    ("edit", "where"),
    [
        (lambda lines: lines.__setitem__(0, "index,t,value"), 1),
        (lambda lines: lines.__setitem__(3, "0,0.2"), 4),
        (lambda lines: lines.__setitem__(3, "0,abc,1.0"), 4),
        (lambda lines: lines.__setitem__(3, "0,0.25,1.0"), 4),
        (lambda lines: lines.__setitem__(3, "8,0.2,1.0"), 4),
    ],
)
def test_data_file_errors(tmp_path, small_data, edit, where):
    path = write_data(small_data, tmp_path / "data.csv")
    _rewrite(path, edit)
    with pytest.raises(InputError) as err:
        read_data(path)
    assert err.value.where == where


def test_data_file_coverage(tmp_path, small_data):
    path = write_data(small_data, tmp_path / "data.csv")
    _rewrite(path, lambda lines: lines.pop())
    with pytest.raises(InputError):
        read_data(path)


def test_data_file_nodes(tmp_path, small_data):
    path = write_data(small_data, tmp_path / "data.csv")
    sidecar = read_json(sidecar_path(path))
    sidecar["grid"]["nodes"][0] = [0.0, 1.0]
    sidecar_path(path).write_text(json.dumps(sidecar))
    with pytest.raises(InputError) as err:
        read_data(path)
    assert err.value.where == "grid.nodes"


def test_data_file_missing(tmp_path, small_data):
    path = write_data(small_data, tmp_path / "data.csv")
    path.unlink()
    with pytest.raises(InputError):
        read_data(path)
    with pytest.raises(InputError):
        read_data(tmp_path / "other.csv")


def test_mode_dumps(tmp_path, bump_solutions):
    paths = write_mode_dumps(bump_solutions, tmp_path / "modes")
    assert [p.name for p in paths] == ["mode_m0_k1.csv"]
    rows = _read_rows(paths[0])
    assert rows[0][:3] == ["t", "h_1", "h_2"] and len(rows[0]) == 65
    assert len(rows) == 1 + bump_solutions[0].t.size


def test_plot_data(tmp_path, bump_data, bump_solutions):
    report = orthogonality_residuals(bump_data, 1, 3)
    rows = _read_rows(write_residual_plot_data(report, tmp_path / "residuals.csv"))
    assert rows[0] == ["m", "k", "q", "lambda", "rho"]
    assert len(rows) == 1 + 3 * 3
    rows = _read_rows(write_profile_plot_data(bump_solutions, tmp_path / "profiles.csv"))
    assert rows[0] == ["m", "k", "r", "value"]
    assert rows[1][:3] == ["0", "1", "0"]
