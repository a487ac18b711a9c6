import json
from math import pi

import numpy as np
import pytest
from spheremean.cli import build_parser, main
from spheremean.fileio import read_data, read_json, write_data
from spheremean.harmonics import sphere_grid
from spheremean.transform import BoundaryData, perturbation_bump, t_grid

SMALL = ["--angular", "16", "--quad", "256"]


@pytest.fixture(scope="module")
def demo_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("demo") / "data.csv"
    assert main(["forward", "--output", str(path), *SMALL]) == 0
    return path


def test_parser():
    args = build_parser().parse_args(["range-test", "--mmax", "3", "-vv"])
    assert args.command == "range-test" and args.mmax == 3 and args.verbose == 2


def test_bessel_zeros(capsys):
    assert main(["bessel-zeros", "--nu", "1/2", "--count", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,zero"
    zeros = [float(line.split(",")[1]) for line in lines[1:]]
    assert np.allclose(zeros, [pi, 2 * pi, 3 * pi], rtol=1e-14)


def test_bessel_zeros_file(tmp_path):
    path = tmp_path / "zeros.csv"
    assert main(["bessel-zeros", "--nu", "0", "--count", "2", "--output", str(path)]) == 0
    assert path.read_text().splitlines()[1].startswith("1,2.40482555769577")


def test_bessel_zeros_errors():
    assert main(["bessel-zeros", "--nu", "abc", "--count", "2"]) == 2
    assert main(["bessel-zeros", "--nu", "-1", "--count", "2"]) == 2
    with pytest.raises(SystemExit):
        main(["bessel-zeros", "--nu", "1", "--count", "0"])


def test_forward_empty(tmp_path):
    phantom = tmp_path / "phantom.json"
    phantom.write_text(json.dumps({"dimension": 2, "terms": []}))
    output = tmp_path / "data.csv"
    argv = ["forward", "--input", str(phantom), "--output", str(output)]
    assert main([*argv, "--angular", "8", "--quad", "16", "--t-samples", "41"]) == 0
    g = read_data(output)
    assert g.values.shape == (8, 41) and np.all(g.values == 0.0)
    manifest = read_json(output.with_suffix(".json"))["manifest"]
    assert str(phantom) in manifest["inputs"]


def test_forward_errors(tmp_path):
    phantom = tmp_path / "phantom.json"
    assert main(["forward", "--angular", "8"]) == 2
    phantom.write_text("{not json")
    assert main(["forward", "--input", str(phantom), "--output", str(tmp_path / "d.csv")]) == 2
    phantom.write_text(json.dumps({"dimension": 4, "terms": []}))
    assert main(["forward", "--input", str(phantom), "--output", str(tmp_path / "d.csv")]) == 3
    assert main(["forward", "--dimension", "4", "--output", str(tmp_path / "d.csv")]) == 3


def test_config_errors(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"bogus": 1}))
    assert main(["lemma-verify", "--config", str(config)]) == 2
    assert main(["lemma-verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_range_test(tmp_path, demo_file):
    report = tmp_path / "range.json"
    argv = ["range-test", "--input", str(demo_file), "--mmax", "4", "--report", str(report)]
    assert main([*argv, "--emit-plot-data"]) == 0
    data = read_json(report)
    assert data["verdict"] == "pass" and data["schema"] == 1
    assert data["manifest"]["command"] == "range-test"
    assert str(demo_file) in data["manifest"]["inputs"]
    assert (tmp_path / "range_residuals.csv").exists()


def test_range_test_stdout(capsys, demo_file):
    assert main(["range-test", "--input", str(demo_file), "--mmax", "1", "--zeros", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["residuals"]) == 3 * 2


def test_range_test_zero_data(tmp_path):
    grid, t = sphere_grid(2, 8), t_grid()
    path = write_data(BoundaryData(grid, t, np.zeros((grid.size, t.size))), tmp_path / "zero.csv")
    assert main(["range-test", "--input", str(path), "--mmax", "2", "--report", str(tmp_path / "r.json")]) == 0


def test_range_test_missing_input():
    assert main(["range-test"]) == 2


def test_moment_test(tmp_path, demo_file):
    assert main(["moment-test", "--input", str(demo_file), "--report", str(tmp_path / "m.json")]) == 0


def test_darboux_solve_bump(tmp_path):
    grid, t = sphere_grid(2, 8), t_grid()
    path = write_data(perturbation_bump(grid, t), tmp_path / "bump.csv")
    modes = tmp_path / "modes"
    argv = ["darboux-solve", "--input", str(path), "--mmax", "0", "--eigs", "16"]
    assert main([*argv, "--dump-modes", str(modes), "--report", str(tmp_path / "d.json")]) == 1
    assert (modes / "mode_m0_k1.csv").exists()
    assert read_json(tmp_path / "d.json")["verdict"] == "fail"


def test_extend_check_negative(tmp_path):
    grid, t = sphere_grid(2, 8), t_grid()
    path = write_data(perturbation_bump(grid, t), tmp_path / "bump.csv")
    report = tmp_path / "e.json"
    argv = ["extend-check", "--input", str(path), "--mmax", "0", "--eigs", "16"]
    assert main([*argv, "--report", str(report)]) == 1
    data = read_json(report)
    assert data["checks"]["range"] == "fail" and data["boundary_mismatch"] is None


def test_lemma_verify(tmp_path):
    report = tmp_path / "lemma.json"
    assert main(["lemma-verify", "--nmax", "3", "--mmax", "4", "--report", str(report)]) == 0
    data = read_json(report)
    assert data["params"] == {"n_max": 3, "m_max": 4}
    assert len(data["entries"]) == 2 * 4 and data["verdict"] == "pass"


def test_pipeline(tmp_path):
    report = tmp_path / "pipeline.json"
    argv = ["pipeline", "--angular", "32", "--mmax", "2", "--report", str(report)]
    assert main(argv) == 0
    data = read_json(report)
    stages = data["stages"]
    assert stages["forward"]["centers"] == 32
    assert set(stages) == {"forward", "range", "moment", "darboux", "extension", "vanishing"}
    assert all(s["verdict"] == "pass" for s in stages.values())
    assert data["verdict"] == "pass"


def test_pipeline_perturbed(tmp_path):
    report = tmp_path / "pipeline.json"
    argv = ["pipeline", "--angular", "32", "--mmax", "2", "--eigs", "32", "--perturb", "0.01"]
    assert main([*argv, "--report", str(report)]) == 1
    data = read_json(report)
    assert data["verdict"] == "fail"
    assert data["stages"]["range"]["verdict"] == "fail"
    assert data["params"]["perturb"] == 0.01


def test_pipeline_sphere(tmp_path):
    report = tmp_path / "pipeline.json"
    assert main(["pipeline", "--dimension", "3", "--report", str(report)]) == 0
    data = read_json(report)
    assert data["stages"]["forward"]["centers"] == 18 * 36
    assert "moment" not in data["stages"]
    assert data["manifest"]["config"]["angular"] == 18


def test_config_types(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"tol": "1e-5"}))
    assert main(["lemma-verify", "--nmax", "2", "--mmax", "1", "--config", str(config)]) == 2


def test_deterministic_reports(tmp_path, demo_file):
    payloads = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert main(["range-test", "--input", str(demo_file), "--mmax", "2", "--report", str(path)]) == 0
        data = read_json(path)
        data["manifest"].pop("run")
        payloads.append(data)
    assert payloads[0] == payloads[1]
