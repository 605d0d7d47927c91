import json
import math

import numpy as np
import pytest

from carpetlab.carpet import CarpetGrid, dominant_extrema
from carpetlab.harness import output
from carpetlab.harness.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from carpetlab.harness.commands import (cmd_carpet, cmd_slice, cmd_traces,
                                        cmd_validate, thread_count)
from carpetlab.harness.config import ConfigError, load_config, parse_config

STILL = {"xbar_over_L": 0.25, "dx_over_L": 0.05, "kbar_times_L": 0}
MOVING = {"xbar_over_L": 0.25, "dx_over_L": 0.05, "kbar_times_L": 20 * math.pi}


def make(packet=STILL, **extra):
    doc = {"box": {"M": 1, "L": 1, "hbar": 1}, "packet": dict(packet),
           "grid": {"nx": 16, "nt": 8, "t_max_over_T": 0.5}}
    doc.update(extra)
    return doc


@pytest.fixture
def config_file(tmp_path):
    def write(doc):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(doc))
        return str(path)
    return write


# -- configuration -------------------------------------------------------------

def test_config_defaults():
    run = parse_config({"packet": STILL})
    assert (run.nx, run.nt, run.evaluator, run.output_format) == (128, 128, "gaussian-lines", "pgm16")
    assert run.M_max is None and run.t_max == pytest.approx(0.5 * run.box.revival_time)


def test_config_roundtrip():
    run = parse_config(make(truncations={"n_max": 40, "l_max": "auto"}))
    again = parse_config(run.to_dict())
    assert again == run


@pytest.mark.parametrize("patch", [
    {"grid": {"nx": 1, "nt": 8}},
    {"grid": {"nx": 8, "nt": 8, "t_max_over_T": 0}},
    {"evaluator": "spline"},
    {"output": {"format": "png"}},
    {"truncations": {"n_max": 0}},
    {"truncations": {"M_max": "many"}},
    {"packet": {"xbar_over_L": 1.5, "dx_over_L": 0.05}},
    {"packet": {"xbar_over_L": 0.5, "dx_over_L": -0.05}},
    {"packet": {"dx_over_L": 0.05}},
    {"packet": {"kind": "eigenmode", "mode": 0}, "evaluator": "direct"},
    {"packet": {"kind": "eigenmode", "mode": 1}, "evaluator": "gaussian-lines"},
    {"packet": {"kind": "plane"}},
    {"box": {"M": -1}},
])
def test_config_rejects(patch):
    doc = make()
    doc.update(patch)
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_config_not_object():
    with pytest.raises(ConfigError):
        parse_config([1, 2])


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    with pytest.raises(OSError):
        load_config(str(tmp_path / "missing.json"))


def test_thread_count():
    assert thread_count({}) >= 1
    assert thread_count({"CARPETLAB_THREADS": "1"}) == 1
    assert thread_count({"CARPETLAB_THREADS": "6"}) == 6
    for bad in ("0", "-2", "many"):
        with pytest.raises(ConfigError):
            thread_count({"CARPETLAB_THREADS": bad})


# -- writers ---------------------------------------------------------------------

def _grid(values):
    values = np.asarray(values, dtype=float)
    nt, nx = values.shape
    return CarpetGrid(np.linspace(0, 1, nx), np.linspace(0, 1, nt), values, "direct", {})


def test_pgm_orientation_and_scaling(tmp_path):
    values = np.array([[0.0, 1.0, 2.0], [3.0, 4.0, 6.0]])
    path = str(tmp_path / "a.pgm")
    output.write_pgm(path, _grid(values), {"k": 1})
    data = open(path, "rb").read()
    assert data.startswith(b"P5\n3 2\n65535\n")
    img = output.read_pgm(path)
    # top row is the latest time
    assert img[0].tolist() == [32768, 43690, 65535]
    assert img[1].tolist() == [0, 10923, 21845]
    assert json.loads(open(path + ".json").read()) == {"k": 1}


def test_pgm_constant_grid_is_black():
    assert np.all(output.pgm_intensities(np.full((3, 4), 2.5)) == 0)


def test_pgm_rounds_half_up():
    levels = output.pgm_intensities(np.array([[0.0, 0.5 / 65535, 1.0]]))
    assert levels.tolist() == [[0, 1, 65535]]


def test_csv_roundtrip_exact():
    vals = np.array([0.1, 1 / 3, 2.0 ** -1074, 1e300, -0.0])
    text = output.csv_text(["v"], [vals])
    assert "\r" not in text and text.endswith("\n")
    back = np.array([float(s) for s in text.splitlines()[1:]])
    assert back.tobytes() == vals.tobytes()


def test_dumps_json_canonical():
    assert output.dumps_json({"b": 1, "a": [1.5]}) == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        output.dumps_json({"a": float("nan")})


# -- commands ----------------------------------------------------------------------

def test_carpet_smoke_two_by_two(tmp_path):
    run = parse_config(make(grid={"nx": 2, "nt": 2, "t_max_over_T": 0.5}))
    path, meta = cmd_carpet(run, str(tmp_path / "s.pgm"))
    img = output.read_pgm(path)
    assert img.shape == (2, 2)
    assert math.isfinite(meta["W_min"]) and math.isfinite(meta["W_max"])
    side = json.loads(open(path + ".json").read())
    assert side["truncations"]["n_max"] == 102
    assert "tolerances" in side and "timings" not in json.dumps(side)


@pytest.mark.parametrize("evaluator", ["direct", "gaussian-lines", "factorized"])
def test_carpet_deterministic(tmp_path, evaluator):
    run = parse_config(make(evaluator=evaluator))
    a, _ = cmd_carpet(run, str(tmp_path / "a.pgm"), threads=1)
    b, _ = cmd_carpet(run, str(tmp_path / "b.pgm"), threads=4)
    assert open(a, "rb").read() == open(b, "rb").read()
    assert open(a + ".json").read() == open(b + ".json").read()


def test_carpet_csv_and_json(tmp_path):
    run = parse_config(make(output={"format": "csv"}))
    path, _ = cmd_carpet(run, str(tmp_path / "c.csv"))
    lines = open(path).read().splitlines()
    assert lines[0] == "t_over_T,x_over_L,W" and len(lines) == 1 + 16 * 8
    run = parse_config(make(output={"format": "json"}))
    path, _ = cmd_carpet(run, str(tmp_path / "c.json"))
    doc = json.loads(open(path).read())
    assert np.array(doc["W"]).shape == (8, 16)


def test_carpet_eigenmode(tmp_path):
    run = parse_config(make(packet={"kind": "eigenmode", "mode": 2}, evaluator="direct"))
    path, meta = cmd_carpet(run, str(tmp_path / "e.pgm"))
    assert meta["truncations"] == {"M_max": 2}


def test_carpet_needs_path():
    with pytest.raises(ConfigError):
        cmd_carpet(parse_config(make()))


def test_carpet_unsafe_packet_warns(tmp_path):
    run = parse_config(make({"xbar_over_L": 0.06, "dx_over_L": 0.05, "kbar_times_L": 0}))
    _, meta = cmd_carpet(run, str(tmp_path / "u.pgm"))
    assert any("boundary-unsafe" in w for w in meta["warnings"])


def test_traces_command():
    run = parse_config(make())
    events = cmd_traces(run, 1e-3)
    assert not [e for e in events if e["term_class"] == "interference" and abs(e["n"]) == 2]
    weights = [e["weight"] for e in events]
    assert weights == sorted(weights, reverse=True)
    with pytest.raises(ConfigError):
        cmd_traces(run, 1.5)


def _slice(run, axis, value):
    rows = cmd_slice(run, axis, value).splitlines()
    assert rows[0] == "coordinate,W_direct,W_lines,abs_diff"
    return np.array([[float(v) for v in r.split(",")] for r in rows[1:]])


def test_slice_initial_condition():
    run = parse_config(make(grid={"nx": 200, "nt": 8, "t_max_over_T": 1.0}))
    data = _slice(run, "fixed-t", 0.0)
    g2 = run.packet().density(data[:, 0])
    assert np.max(np.abs(data[:, 1] - g2)) <= 1e-6 * np.max(g2)
    assert np.max(data[:, 3]) <= 1e-6 * np.max(g2)
    later = _slice(run, "fixed-t", 1.0)
    assert np.max(np.abs(later[:, 1] - data[:, 1])) <= 1e-9


def test_slice_fixed_x():
    run = parse_config(make(MOVING, grid={"nx": 8, "nt": 64, "t_max_over_T": 0.5}))
    data = _slice(run, "fixed-x", 0.3)
    assert data.shape == (64, 4)
    assert data[-1, 0] == 0.5


@pytest.mark.parametrize("n,expected", [(1, ["max", "min", "max"]), (-1, ["min", "max", "min"])])
def test_slice_across_main_diagonal(n, expected):
    run = parse_config(make(MOVING, grid={"nx": 2001, "nt": 8, "t_max_over_T": 0.5}))
    data = _slice(run, "fixed-t", 0.125)
    center = 0.25 if n == 1 else 0.75
    window = np.abs(data[:, 0] - center) <= 0.035
    ext = dominant_extrema(data[window, 0], data[window, 1], count=10)
    assert [k for _, k, _ in ext] == expected


@pytest.mark.parametrize("axis,value", [("fixed-t", 0.6), ("fixed-t", -0.1), ("fixed-x", 1.2),
                                        ("diagonal", 0.1), ("fixed-x", float("nan"))])
def test_slice_rejects(axis, value):
    with pytest.raises(ConfigError):
        cmd_slice(parse_config(make()), axis, value)


def test_validate_eigenmode_stationary():
    run = parse_config(make(packet={"kind": "eigenmode", "mode": 1}, evaluator="direct"))
    report = cmd_validate(run)
    assert report.passed and report["stationarity"].passed


def test_validate_forced_truncation_failure():
    run = parse_config(make(truncations={"n_max": 1}))
    report = cmd_validate(run)
    assert not report.passed
    assert not report["oracle_equivalence"].passed
    assert any(f.startswith("truncation") for f in report.flags)
    for c in report.to_dict()["checks"]:
        assert c["pass"] == (c["max_abs_error"] <= c["tolerance"])


# -- CLI ----------------------------------------------------------------------------

def test_cli_carpet_and_exit_codes(config_file, tmp_path, capsys):
    cfg = config_file(make(output={"format": "pgm16", "path": str(tmp_path / "o.pgm")}))
    assert main(["carpet", "--config", cfg]) == EXIT_OK
    assert (tmp_path / "o.pgm").exists()
    assert main(["carpet", "--config", cfg, "--evaluator", "direct",
                 "--out", str(tmp_path / "d.pgm")]) == EXIT_OK
    assert main(["carpet", "--config", str(tmp_path / "none.json")]) == EXIT_IO
    assert main(["carpet", "--config", cfg, "--out", str(tmp_path / "no" / "x.pgm")]) == EXIT_IO
    bad = config_file(make(grid={"nx": 1}))
    assert main(["carpet", "--config", bad]) == EXIT_CONFIG


def test_cli_traces_stdout(config_file, capsys):
    cfg = config_file(make())
    assert main(["traces", "--config", cfg, "--threshold", "1.0"]) == EXIT_OK
    events = json.loads(capsys.readouterr().out)
    assert events and {e["weight"] for e in events} <= {1.0, 2.0}


def test_cli_slice_and_range(config_file, tmp_path, capsys):
    cfg = config_file(make())
    out = tmp_path / "s.csv"
    assert main(["slice", "--config", cfg, "--axis", "fixed-x", "--value", "0.5",
                 "--out", str(out)]) == EXIT_OK
    assert out.read_text().startswith("coordinate,")
    assert main(["slice", "--config", cfg, "--value", "0.9"]) == EXIT_CONFIG


def test_cli_validate_failure_exit(config_file, tmp_path, capsys):
    cfg = config_file(make(truncations={"n_max": 1}))
    out = tmp_path / "r.json"
    assert main(["validate", "--config", cfg, "--out", str(out)]) == EXIT_VALIDATION
    assert "FAIL" in capsys.readouterr().out
    assert json.loads(out.read_text())["pass"] is False


def test_cli_bad_threads(config_file, tmp_path, monkeypatch):
    monkeypatch.setenv("CARPETLAB_THREADS", "zero")
    cfg = config_file(make(output={"path": str(tmp_path / "o.pgm")}))
    assert main(["carpet", "--config", cfg]) == EXIT_CONFIG
